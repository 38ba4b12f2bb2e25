#include "moikit/tensor.hpp"

#include <sstream>

#include "moikit/error.hpp"

namespace moikit {

namespace {

using RowMajor = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

std::string shape_string(std::span<const Index> s) {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < s.size(); ++i) os << (i ? "," : "") << s[i];
  os << ")";
  return os.str();
}

void check_modes(std::span<const Index> dims) {
  require(!dims.empty(), ErrorKind::validation, "tensor needs at least one mode");
  for (Index d : dims) require(d >= 1, ErrorKind::validation, "tensor mode dimensions must be positive");
}

}  // namespace

Index shape_product(std::span<const Index> dims) {
  Index p = 1;
  for (Index d : dims) p *= d;
  return p;
}

Tensor::Tensor(std::vector<Index> s, std::vector<cplx> d) : shape(std::move(s)), data(std::move(d)) {
  for (Index x : shape) require(x >= 1, ErrorKind::validation, "tensor dimensions must be positive");
  if (shape_product(shape) != static_cast<Index>(data.size()))
    raise(ErrorKind::validation, "tensor of shape " + shape_string(shape) + " needs " +
                                     std::to_string(shape_product(shape)) + " entries, got " +
                                     std::to_string(data.size()));
}

Tensor Tensor::zeros(std::vector<Index> s) {
  const Index n = shape_product(s);
  return Tensor(std::move(s), std::vector<cplx>(static_cast<std::size_t>(n)));
}

namespace {
std::size_t flat_index(std::span<const Index> shape, std::span<const Index> index) {
  require(index.size() == shape.size(), ErrorKind::validation, "tensor index rank mismatch");
  std::size_t flat = 0;
  for (std::size_t i = 0; i < shape.size(); ++i) {
    require(index[i] >= 0 && index[i] < shape[i], ErrorKind::validation, "tensor index out of range");
    flat = flat * static_cast<std::size_t>(shape[i]) + static_cast<std::size_t>(index[i]);
  }
  return flat;
}
}  // namespace

cplx& Tensor::at(std::span<const Index> index) { return data[flat_index(shape, index)]; }
cplx Tensor::at(std::span<const Index> index) const { return data[flat_index(shape, index)]; }

Tensor Tensor::conj() const {
  Tensor t = *this;
  for (auto& z : t.data) z = std::conj(z);
  return t;
}

Tensor star_k(const Tensor& a, const Tensor& b, std::size_t k) {
  if (k > a.shape.size() || k > b.shape.size())
    raise(ErrorKind::validation, "star_k: contraction count exceeds tensor order");
  for (std::size_t i = 0; i < k; ++i) {
    if (a.shape[a.shape.size() - k + i] != b.shape[i])
      raise(ErrorKind::validation, "star_k: trailing modes " + shape_string(a.shape) +
                                       " do not match leading modes " + shape_string(b.shape));
  }
  const std::span<const Index> as(a.shape), bs(b.shape);
  const Index rows = shape_product(as.first(as.size() - k));
  const Index inner_dim = shape_product(as.subspan(as.size() - k));
  const Index cols = shape_product(bs.subspan(k));
  const Eigen::Map<const RowMajor> ma(a.data.data(), rows, inner_dim);
  const Eigen::Map<const RowMajor> mb(b.data.data(), inner_dim, cols);
  const RowMajor prod = ma * mb;

  std::vector<Index> shape(as.begin(), as.end() - static_cast<std::ptrdiff_t>(k));
  shape.insert(shape.end(), bs.begin() + static_cast<std::ptrdiff_t>(k), bs.end());
  return Tensor(std::move(shape), std::vector<cplx>(prod.data(), prod.data() + prod.size()));
}

cplx inner(const Tensor& u, const Tensor& v) {
  require(u.shape == v.shape, ErrorKind::validation, "inner product: shapes differ");
  cplx s = 0.0;
  for (std::size_t i = 0; i < u.data.size(); ++i) s += std::conj(u.data[i]) * v.data[i];
  return s;
}

SquareTensor::SquareTensor(std::vector<Index> dims, std::vector<cplx> e)
    : mode_dims(std::move(dims)), entries(std::move(e)) {
  check_modes(mode_dims);
  const Index p = side();
  if (static_cast<Index>(entries.size()) != p * p)
    raise(ErrorKind::validation, "tensor with modes " + shape_string(mode_dims) + " needs " +
                                     std::to_string(p * p) + " entries, got " + std::to_string(entries.size()));
  for (const auto& z : entries)
    require(std::isfinite(z.real()) && std::isfinite(z.imag()), ErrorKind::validation, "tensor entries must be finite");
}

ComplexMatrix SquareTensor::unfold() const {
  const Index p = side();
  return Eigen::Map<const RowMajor>(entries.data(), p, p);
}

SquareTensor SquareTensor::fold(const ComplexMatrix& m, std::vector<Index> dims) {
  check_modes(dims);
  const Index p = shape_product(dims);
  if (m.rows() != p || m.cols() != p)
    raise(ErrorKind::validation, "fold: matrix of size " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                                     " does not match modes " + shape_string(dims));
  const RowMajor r = m;
  return SquareTensor(std::move(dims), std::vector<cplx>(r.data(), r.data() + r.size()));
}

Tensor SquareTensor::as_tensor() const {
  std::vector<Index> shape = mode_dims;
  shape.insert(shape.end(), mode_dims.begin(), mode_dims.end());
  return Tensor(std::move(shape), entries);
}

HermitianTensor::HermitianTensor(SquareTensor t) : t_(std::move(t)), op_(t_.unfold()) {}

HermitianTensor HermitianTensor::fold(const HermitianOperator& op, std::vector<Index> mode_dims) {
  return HermitianTensor(SquareTensor::fold(op.matrix(), std::move(mode_dims)));
}

SquareTensor TensorEigenSystem::reconstruct() const {
  const Index p = shape_product(mode_dims);
  ComplexMatrix m = ComplexMatrix::Zero(p, p);
  for (std::size_t i = 0; i < eigenvalues.size(); ++i) {
    const Eigen::Map<const ComplexVector> u(eigentensors[i].data.data(), p);
    m += eigenvalues[i] * u * u.adjoint();
  }
  return SquareTensor::fold(m, mode_dims);
}

TensorEigenSystem tensor_eigendecompose(const HermitianTensor& h) {
  const auto& s = h.unfold().spectral();
  TensorEigenSystem sys;
  sys.mode_dims = h.mode_dims();
  sys.positive_semidefinite = true;
  for (Index i = 0; i < s.dim(); ++i) {
    const double lambda = s.eigenvalues()[i].real();
    sys.eigenvalues.push_back(lambda);
    if (lambda < -kPsdTolerance) sys.positive_semidefinite = false;
    const ComplexVector col = s.basis().col(i);
    sys.eigentensors.emplace_back(sys.mode_dims, std::vector<cplx>(col.data(), col.data() + col.size()));
  }
  return sys;
}

SquareTensor mti_evaluate(std::span<const HermitianTensor> tensors, const MultivariateFunction& psi,
                          std::span<const SquareTensor> arguments, const MoiOptions& options) {
  require(!tensors.empty(), ErrorKind::validation, "MTI needs at least one tensor");
  const auto& dims = tensors.front().mode_dims();
  for (const auto& t : tensors)
    if (t.mode_dims() != dims)
      raise(ErrorKind::validation, "MTI tensors disagree on mode dimensions: " + shape_string(dims) + " vs " +
                                       shape_string(t.mode_dims()));
  for (const auto& x : arguments)
    if (x.mode_dims != dims)
      raise(ErrorKind::validation, "MTI argument modes " + shape_string(x.mode_dims) + " differ from " +
                                       shape_string(dims));
  std::vector<SpectralRef> refs;
  for (const auto& t : tensors) refs.emplace_back(t.unfold().spectral());
  std::vector<ComplexMatrix> args;
  for (const auto& x : arguments) args.push_back(x.unfold());
  return SquareTensor::fold(moi_apply(refs, psi, args, options), dims);
}

}  // namespace moikit
