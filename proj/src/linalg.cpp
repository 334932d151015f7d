#include "fraclab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <unsupported/Eigen/MatrixFunctions>

#include "fraclab/errors.hpp"

namespace fraclab {

namespace {

Matrix gaussian_matrix(int rows, int cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix m(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) m(i, j) = normal(rng);
  return m;
}

// One modified Gram-Schmidt pass. Returns false if a column collapses.
bool mgs_pass(Matrix& q) {
  for (Eigen::Index j = 0; j < q.cols(); ++j) {
    for (Eigen::Index i = 0; i < j; ++i) q.col(j) -= q.col(i).dot(q.col(j)) * q.col(i);
    const double n = q.col(j).norm();
    if (!(n > 0.0) || !std::isfinite(n)) return false;
    q.col(j) /= n;
  }
  return true;
}

}  // namespace

UnitDirection::UnitDirection(const Vector& v) {
  const double n = v.norm();
  if (v.size() == 0 || !(n > 0.0) || !std::isfinite(n))
    throw Error(ErrorKind::DegenerateInput, "direction must be a nonzero finite vector");
  v_ = v / n;
}

UnitDirection UnitDirection::axis(int n, int i) {
  if (i < 0 || i >= n) throw Error(ErrorKind::InvalidDimension, "axis index out of range");
  Vector e = Vector::Zero(n);
  e[i] = 1.0;
  return UnitDirection(Trusted{}, std::move(e));
}

UnitDirection UnitDirection::operator-() const { return UnitDirection(Trusted{}, -v_); }

UnitDirection UnitDirection::canonical() const { return UnitDirection(Trusted{}, canonical_sign(v_)); }

Frame Frame::from_orthonormal(Matrix columns) {
  if (columns.cols() > columns.rows() || columns.rows() == 0)
    throw Error(ErrorKind::InvalidDimension, "frame needs 1 <= k <= N");
  Frame f(std::move(columns));
  if (!(f.gram_error() <= kGramTolerance))
    throw Error(ErrorKind::DegenerateInput, "columns are not orthonormal");
  return f;
}

Frame Frame::identity(int n, int k) {
  if (k < 1 || k > n) throw Error(ErrorKind::InvalidDimension, "frame needs 1 <= k <= N");
  return Frame(Matrix::Identity(n, k));
}

double Frame::gram_error() const {
  const Matrix g = q_.transpose() * q_;
  return (g - Matrix::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff();
}

Frame Frame::canonical() const {
  std::vector<Vector> cols;
  cols.reserve(q_.cols());
  for (Eigen::Index j = 0; j < q_.cols(); ++j) cols.push_back(canonical_sign(q_.col(j)));
  std::sort(cols.begin(), cols.end(), [](const Vector& a, const Vector& b) {
    return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
  });
  Matrix out(q_.rows(), q_.cols());
  for (Eigen::Index j = 0; j < q_.cols(); ++j) out.col(j) = cols[static_cast<std::size_t>(j)];
  return Frame(std::move(out));
}

Subspace Subspace::span(const Matrix& vectors) { return Subspace(orthonormalize(vectors)); }

Matrix Subspace::projector() const { return basis_.matrix() * basis_.matrix().transpose(); }

Frame orthonormalize(const Matrix& vectors) {
  if (vectors.cols() < 1 || vectors.cols() > vectors.rows())
    throw Error(ErrorKind::InvalidDimension, "need 1 <= m <= N vectors");
  if (!vectors.allFinite()) throw Error(ErrorKind::DegenerateInput, "non-finite input");
  Eigen::JacobiSVD<Matrix> svd(vectors);
  const auto& sv = svd.singularValues();
  if (!(sv[sv.size() - 1] > 1e-10)) throw Error(ErrorKind::DegenerateInput, "vectors are rank-deficient");
  Matrix q = vectors;
  if (!mgs_pass(q) || !mgs_pass(q)) throw Error(ErrorKind::DegenerateInput, "vectors are rank-deficient");
  return Frame::from_orthonormal(std::move(q));
}

Frame random_frame(int n, int k, std::uint64_t seed) {
  if (n < 1 || k < 1 || k > n) throw Error(ErrorKind::InvalidDimension, "random_frame needs 1 <= k <= N");
  std::mt19937_64 rng(seed);
  Matrix g = gaussian_matrix(n, n, rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(n, n);
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  // Sign fix makes the distribution Haar.
  for (int j = 0; j < n; ++j)
    if (r(j, j) < 0) q.col(j) = -q.col(j);
  Matrix cols = q.leftCols(k);
  mgs_pass(cols);
  return Frame::from_orthonormal(std::move(cols));
}

Frame perturb_frame(const Frame& frame, double step, std::uint64_t seed) {
  if (step <= 0.0) return frame;
  const int n = frame.dim();
  const int k = frame.size();
  std::mt19937_64 rng(seed);
  Matrix basis(n, n);
  basis.leftCols(k) = frame.matrix();
  if (k < n) basis.rightCols(n - k) = complement_basis(frame.matrix());
  // Generator in frame coordinates: [[Omega, -B^T], [B, 0]].
  Matrix gen = Matrix::Zero(n, n);
  Matrix g = gaussian_matrix(n, n, rng);
  for (int j = 0; j < k; ++j)
    for (int i = 0; i < n; ++i) {
      if (i == j) continue;
      if (i < k && i < j) continue;
      gen(i, j) = g(i, j);
      gen(j, i) = -g(i, j);
    }
  const double fro = gen.norm();
  if (!(fro > 0.0)) return frame;
  gen *= step / fro;
  const Matrix a = basis * gen * basis.transpose();
  Matrix rot = a.exp();
  Matrix q = rot * frame.matrix();
  mgs_pass(q);
  return Frame::from_orthonormal(std::move(q));
}

Matrix orthogonal_complement_projector(const Subspace& v) {
  const int n = v.ambient_dim();
  return Matrix::Identity(n, n) - v.projector();
}

Matrix complement_basis(const Matrix& q) {
  const auto n = q.rows();
  const auto k = q.cols();
  if (k >= n) return Matrix(n, 0);
  Eigen::HouseholderQR<Matrix> qr(q);
  Matrix full = qr.householderQ() * Matrix::Identity(n, n);
  Matrix c = full.rightCols(n - k);
  // Re-project against q for cleanliness.
  c -= q * (q.transpose() * c);
  mgs_pass(c);
  return c;
}

Matrix random_rotation(int n, std::uint64_t seed) {
  Matrix q = random_frame(n, n, seed).matrix();
  if (q.determinant() < 0) q.col(0) = -q.col(0);
  return q;
}

double max_column_angle(const Frame& a, const Frame& b) {
  double worst = 0.0;
  for (int j = 0; j < a.size(); ++j) {
    const double c = std::clamp(a.matrix().col(j).dot(b.matrix().col(j)), -1.0, 1.0);
    // atan2 form keeps accuracy for tiny angles.
    const double s = (a.matrix().col(j) - c * b.matrix().col(j)).norm();
    worst = std::max(worst, std::atan2(s, c));
  }
  return worst;
}

double line_angle(const Vector& a, const Vector& b) {
  const Vector ua = a.normalized();
  const Vector ub = b.normalized();
  const double c = std::abs(ua.dot(ub));
  const double s = (ua - ua.dot(ub) * ub).norm();
  return std::atan2(s, c);
}

Vector canonical_sign(const Vector& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) > 1e-14) return v[i] < 0 ? Vector(-v) : v;
  }
  return v;
}

bool lexicographic_less(const Matrix& a, const Matrix& b) {
  return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
}

}  // namespace fraclab
