#pragma once

#include <iosfwd>
#include <span>
#include <string>

namespace janus {
class CsrMatrix;
}

namespace janus::io {

/// 17 significant digits: enough to round-trip any double.
std::string fmt(double v);

/// `%%MatrixMarket matrix coordinate real symmetric`, lower triangle, 1-based.
void write_matrix_market(std::ostream& out, const CsrMatrix& a);

}  // namespace janus::io
