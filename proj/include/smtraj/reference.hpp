#pragma once

#include "smtraj/gradients.hpp"

/// Serial, unfused reference implementations of the functionals and their
/// gradients. They go through the pointwise kernel API (h_value, psi_star,
/// surface and control evaluation) node by node, and apply the transpose of
/// the state map as an explicit O(N^2) sum. Used to cross-check the
/// node-parallel kernels and as the baseline in bench/.
namespace smtraj::reference {

FunctionalBreakdown evaluate(const ProblemSpec& spec, const TimeGrid& grid, const DerivativeGrid& z, const Vec& p);

GradientBundle gradient(const ProblemSpec& spec, const TimeGrid& grid, const DerivativeGrid& z, const Vec& p);

}  // namespace smtraj::reference
