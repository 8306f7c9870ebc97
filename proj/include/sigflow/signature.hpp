#pragma once

#include "sigflow/paths.hpp"
#include "sigflow/tensor_series.hpp"

#include <vector>

namespace sigflow {

// Signature of a piecewise-linear path: chained product of the closed-form
// segment signatures.
TruncatedTensorSeries path_signature(const Polyline& x, int order);
TruncatedTensorSeries path_signature(const AugmentedPath& x, int order);

// Running signatures over [0, t_j] for j = 1..N; rows[j-1] covers [0, t_j].
struct SignatureStream {
    TimeGrid grid;
    std::vector<TruncatedTensorSeries> rows;
};

// One product per segment, so cost is linear in N.
SignatureStream signature_stream(const AugmentedPath& x, int order);

}  // namespace sigflow
