#pragma once

#include <optional>

#include "topolens/distance.hpp"
#include "topolens/types.hpp"

namespace topolens {

// Vietoris-Rips persistence in dimensions 0 and 1.
//
// The filtration value of a simplex is the maximum pairwise distance of its
// vertices. Simplices are totally ordered by (value, dimension, lexicographic
// vertex order); ties in value are exact reuse of input distances, so no
// tolerance is applied anywhere.
//
// Dim 0: births are 0, finite deaths are exactly the N-1 minimum-spanning-tree
// edge weights of the complete graph (threshold does not apply), plus one
// infinite bar.
//
// Dim 1: boundary-matrix semantics over edges and triangles with value <=
// threshold. Classes still alive at the threshold are reported with death =
// threshold and flagged truncated. Zero-persistence pairs are discarded.
//
// threshold: nullopt selects the enclosing radius (auto). Any requested
// threshold is clamped to the enclosing radius internally, which cannot change
// the result. Throws NumericError for max_dim > 1 or threshold < 0.
//
// This is the production kernel: persistent cohomology over Z/2 with the
// tree-edge clearing and an emergent-pair shortcut. Its output matches
// reference::rips_persistence_naive interval-for-interval.
Barcode rips_persistence(const DistanceMatrix& dist, int max_dim,
                         std::optional<double> threshold = std::nullopt);

namespace reference {

// Plain full-boundary-matrix column reduction over the same simplex order.
// Serial, no shortcuts; kept as the correctness reference for the production
// kernel and as the baseline in the benchmark target.
Barcode rips_persistence_naive(const DistanceMatrix& dist, int max_dim,
                               std::optional<double> threshold = std::nullopt);

} // namespace reference

} // namespace topolens
