#pragma once

#include <cstdint>
#include <vector>

#include "topolens/pipeline_local.hpp"
#include "topolens/types.hpp"

namespace topolens {

// Points split between two disjoint unit-separation circles; angles are
// equally spaced per circle and radii carry Gaussian noise of the given sigma,
// so a zero-noise draw gives two congruent regular polygons.
PointCloud gen_two_circles(std::size_t n, double noise_sigma, std::uint64_t seed);

// Vertices of a regular n-gon with the given circumradius, first vertex on the
// positive x axis. Exact dim-1 oracle fixture.
PointCloud gen_regular_ngon(std::size_t n, double radius);

struct SurrogateOptions {
    std::size_t n_samples = 8192; // points per condition
    std::size_t dim = 16;
    double spread_clean = 0.05;
    double spread_poisoned = 0.6;
    std::uint64_t seed = 1;
    // Mixture structure. The defaults make the clean family many small early
    // loops and the poisoned family one large late one; setting both sides
    // equal yields indistinguishable families.
    std::size_t clean_circles = 5;
    std::size_t poisoned_circles = 1;
    double clean_radius = 1.0;
    double poisoned_radius = 4.5;
};

struct SurrogatePair {
    PointCloud clean;
    PointCloud poisoned;
};

// Two Gaussian-mixture families of circles embedded in the first two ambient
// coordinates, with condition-dependent loop count, loop scale and dispersion.
SurrogatePair gen_condition_surrogate(const SurrogateOptions& options);

struct LocalSurrogateOptions {
    std::size_t layers = 6;
    std::size_t samples = 64;   // activation vectors per condition per layer
    std::size_t dim = 128;      // neurons
    std::uint64_t seed = 1;
    // Layers whose poisoned condition gets ring structure in the paired
    // embedding space; empty means i.i.d. everywhere.
    std::vector<std::size_t> loop_layers;
    double loop_radius = 4.0;
    double noise = 0.25;
};

// Synthetic layer stack for the local pipeline. Clean activations are i.i.d.
// Gaussian per layer; poisoned ones match them except on loop_layers, where
// consecutive-layer pairs of each vector trace a noisy circle so the 2D
// embeddings carry an injected 1-cycle.
ActivationStack gen_local_surrogate(const LocalSurrogateOptions& options);

} // namespace topolens
