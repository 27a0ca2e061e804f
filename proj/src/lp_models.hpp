// LP epigraph models of the polyhedral gauges, shared by the solvers and the
// certificate code.
#pragma once

#include "gaugecert/gauge.hpp"
#include "gaugecert/lp.hpp"

namespace gaugecert::detail {

// Number of auxiliary variables used by add_gauge_epigraph.
Index gauge_epigraph_size(const Gauge& J);

// Adds rows over x (at x_off) and auxiliaries (at aux_off) and returns a cost
// vector c over all LP variables with J(x) = min c'v subject to those rows.
Vector add_gauge_epigraph(LpProblem& lp, const Gauge& J, Index x_off, Index aux_off);

}  // namespace gaugecert::detail
