#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace fraclab {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
/// A point of R^N. Plain Eigen vector; finiteness is checked where points enter the library.
using Point = Eigen::VectorXd;

inline constexpr double kGramTolerance = 1e-10;

/// Unit vector of R^N. Construction normalizes and rejects zero or non-finite input.
class UnitDirection {
 public:
  explicit UnitDirection(const Vector& v);

  static UnitDirection axis(int n, int i);

  const Vector& coords() const { return v_; }
  int dim() const { return static_cast<int>(v_.size()); }
  double operator[](int i) const { return v_[i]; }
  UnitDirection operator-() const;

  /// Representative of {xi, -xi} whose first nonzero coordinate is positive.
  UnitDirection canonical() const;

 private:
  struct Trusted {};
  UnitDirection(Trusted, Vector v) : v_(std::move(v)) {}
  Vector v_;
};

/// k orthonormal directions of R^N, stored as the columns of an N x k matrix.
class Frame {
 public:
  /// Wraps columns that are already orthonormal to kGramTolerance; throws DegenerateInput otherwise.
  static Frame from_orthonormal(Matrix columns);
  static Frame identity(int n, int k);

  int dim() const { return static_cast<int>(q_.rows()); }
  int size() const { return static_cast<int>(q_.cols()); }
  const Matrix& matrix() const { return q_; }
  UnitDirection direction(int i) const { return UnitDirection(q_.col(i)); }
  double gram_error() const;

  /// Sign-canonical columns in lexicographic order; used for deterministic witnesses.
  Frame canonical() const;

 private:
  explicit Frame(Matrix q) : q_(std::move(q)) {}
  Matrix q_;
};

/// k-dimensional linear subspace represented by an orthonormal basis.
class Subspace {
 public:
  explicit Subspace(Frame basis) : basis_(std::move(basis)) {}
  /// Span of the given columns (must be linearly independent).
  static Subspace span(const Matrix& vectors);

  const Frame& basis() const { return basis_; }
  int dim() const { return basis_.size(); }
  int ambient_dim() const { return basis_.dim(); }
  /// Orthogonal projector onto V.
  Matrix projector() const;

 private:
  Frame basis_;
};

/// Orthonormal basis of span(vectors) by twice-iterated modified Gram-Schmidt.
Frame orthonormalize(const Matrix& vectors);

/// Haar-distributed k-frame of R^n; deterministic in seed.
Frame random_frame(int n, int k, std::uint64_t seed);

/// Moves the frame along a random Stiefel tangent direction of Frobenius size `step`.
/// The move is exp(A) Q with A skew-symmetric and zero on the complement block, so no
/// column turns by more than `step` radians.
Frame perturb_frame(const Frame& frame, double step, std::uint64_t seed);

/// P = I - Q Q^T for the orthonormal basis Q of V.
Matrix orthogonal_complement_projector(const Subspace& v);

/// Orthonormal basis (N x (N-k)) of the orthogonal complement of the column span of q.
Matrix complement_basis(const Matrix& q);

/// Random proper rotation (det = +1) of R^n.
Matrix random_rotation(int n, std::uint64_t seed);

/// Largest angle (radians) between corresponding columns of two frames of equal shape.
double max_column_angle(const Frame& a, const Frame& b);

/// Angle between the lines spanned by two directions, in [0, pi/2].
double line_angle(const Vector& a, const Vector& b);

Vector canonical_sign(const Vector& v);
bool lexicographic_less(const Matrix& a, const Matrix& b);

}  // namespace fraclab
