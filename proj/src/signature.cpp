#include "sigflow/signature.hpp"

#include <stdexcept>

namespace sigflow {

TruncatedTensorSeries path_signature(const Polyline& x, int order) {
    const int alphabet = x.channels();
    TruncatedTensorSeries sig = TruncatedTensorSeries::unit(alphabet, order);
    const Eigen::MatrixXd inc = x.segments() > 0 ? path_increments(x) : Eigen::MatrixXd();
    for (Eigen::Index j = 0; j < inc.rows(); ++j)
        sig = chen_product(sig, segment_signature(inc.row(j).transpose(), order));
    return sig;
}

TruncatedTensorSeries path_signature(const AugmentedPath& x, int order) {
    return path_signature(Polyline(x), order);
}

SignatureStream signature_stream(const AugmentedPath& x, int order) {
    const int n = x.grid.segments();
    if (n < 1) throw std::invalid_argument("signature_stream: need at least one segment");
    const Eigen::MatrixXd inc = path_increments(x);
    SignatureStream stream{x.grid, {}};
    stream.rows.reserve(static_cast<std::size_t>(n));
    TruncatedTensorSeries sig = TruncatedTensorSeries::unit(static_cast<int>(inc.cols()), order);
    for (int j = 0; j < n; ++j) {
        sig = chen_product(sig, segment_signature(inc.row(j).transpose(), order));
        stream.rows.push_back(sig);
    }
    return stream;
}

}  // namespace sigflow
