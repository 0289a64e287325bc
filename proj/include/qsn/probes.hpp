#pragma once

#include <vector>

#include "qsn/network.hpp"

namespace qsn {

/// Catalog of probe states for sensor networks. Every constructor returns a
/// normalized NetworkState on the given layout; extremal eigenstates are
/// resolved through the sensors' shared linear-spectrum generator, and a
/// degenerate extremum raises SchemaError instead of guessing a
/// representative.

/// Network-wide two-branch superposition over "n particles or fewer":
/// (|lam_max(n)>^(x)d + |lam_min(n)>^(x)d)/sqrt(2), where |lam_max(n)> is the
/// unique extremal eigenstate of the shared generator among all sectors with
/// at most n particles. All parameters must carry one identical linear
/// generator. For a single sensor this degenerates to the local two-level
/// superposition.
NetworkState ghz(const NetworkLayout& layout, int n_per_sensor);

/// Per-sensor-weighted two-branch superposition:
/// ((x)_k |lam_max(w_k)> + (x)_k |lam_min(w_k)>)/sqrt(2). A zero weight puts
/// that sensor in the vacuum on both branches, leaving it disentangled.
NetworkState weighted_ghz(const NetworkLayout& layout, const std::vector<int>& weights);

/// Generalized NOON state over all S sensors: a superposition of "all
/// n_particles in sensor k, vacuum elsewhere" terms, with the final sensor's
/// term scaled by the balancing factor gamma >= 0 and overall normalization
/// 1/sqrt(S-1+gamma^2). The occupied single-sensor state is the eigenstate of
/// the shared generator with eigenvalue of maximal modulus among sectors with
/// at most n_particles (the maximal branch wins a modulus tie).
NetworkState gns(const NetworkLayout& layout, int n_particles, double gamma);

/// Unbalanced number-operator superposition: the d-sensor product state
/// (x)_k (|n_particles> + sqrt(d-1)|0>)/sqrt(d). Requires one-dimensional
/// vacuum and n_particles sectors (e.g. bosonic modes).
NetworkState uns(const NetworkLayout& layout, int n_particles);

/// Fully separable superposition: (x)_k (|lam_min(w_k)> + |lam_max(w_k)>)/sqrt(2)
/// per sensor, with the same zero-weight vacuum convention as weighted_ghz.
NetworkState local_superposition(const NetworkLayout& layout, const std::vector<int>& weights);

/// Product state reproducing the input's per-sensor generator statistics with
/// every cross-sensor generator covariance removed. Requires exactly one
/// linear-spectrum parameter per sensor. Per sensor, basis states are grouped
/// by (particle number, generator eigenvalue); each group's total probability
/// is placed, with positive real amplitude, on the group's first basis state.
/// This preserves per-sensor generator distributions and the mean total
/// particle number.
NetworkState separable_surrogate(const NetworkState& state);

}  // namespace qsn
