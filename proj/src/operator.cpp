#include "mgbounds/operator.hpp"

namespace mgb {

Operator::Operator(SparseMatrix s) : sparse_(std::move(s)) {
  sparse_.makeCompressed();
  dense_ = Matrix(sparse_);
}

Operator::Operator(const Matrix& d, double drop_tol) : dense_(d) {
  const double cut = drop_tol * max_abs(d);
  sparse_ = d.sparseView(1.0, cut);
  sparse_.makeCompressed();
}

}  // namespace mgb
