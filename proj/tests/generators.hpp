#pragma once

// Small seeded generators for property tests.

#include "bernstein/manifold.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace gen {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine_); }
    bool coin() { return integer(0, 1) == 1; }
    std::uint64_t seed() { return engine_(); }

    bernstein::Vec2 vec2(double scale = 1.0) { return {uniform(-scale, scale), uniform(-scale, scale)}; }
    bernstein::Sym2 sym2(double scale = 1.0) {
        return {uniform(-scale, scale), uniform(-scale, scale), uniform(-scale, scale)};
    }
    bernstein::Sym2 spd() {
        const bernstein::Vec2 a = vec2(), b = vec2();
        const bernstein::Sym2 s = bernstein::outer(a) + bernstein::outer(b);
        return s + bernstein::Sym2{0.1, 0.0, 0.1};
    }

    // A torus, patch or sphere with a random catalog weight.
    bernstein::ManifoldDescription manifold() {
        bernstein::ManifoldDescription d;
        const int kind = integer(0, 2);
        const int n = 8 * integer(2, 4);
        if (kind == 0) {
            d.kind = bernstein::ManifoldKind::torus;
            d.resolution = {n, n};
        } else if (kind == 1) {
            d.kind = bernstein::ManifoldKind::flat_patch;
            d.resolution = {n + 1, n + 1};
            d.side = uniform(2.0, 6.0);
        } else {
            d.kind = bernstein::ManifoldKind::sphere;
            d.resolution = {n, 2 * n};
            d.radius = uniform(0.5, 3.0);
        }
        d.synthetic_dimension = uniform(2.5, 8.0);
        using bernstein::ManifoldKind;
        using bernstein::WeightKind;
        const int pick = integer(0, 3);
        if (pick == 1 && d.kind != ManifoldKind::sphere) {
            d.weight.kind = WeightKind::sine;
            d.weight.axis = integer(0, 1);
            d.weight.wavenumber = d.kind == ManifoldKind::torus ? double(integer(1, 2)) : uniform(0.5, 2.0);
        } else if (pick == 2 && d.kind == ManifoldKind::flat_patch) {
            d.weight.kind = WeightKind::radial_gaussian;
            d.weight.width = uniform(0.5, 2.0);
        } else if (pick == 3 && d.kind != ManifoldKind::torus) {
            d.weight.kind = WeightKind::linear;
            d.weight.axis = integer(0, d.kind == ManifoldKind::sphere ? 2 : 1);
        }
        d.weight.amplitude = d.weight.kind == WeightKind::zero ? 0.0 : uniform(-1.0, 1.0);
        return d;
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace gen
