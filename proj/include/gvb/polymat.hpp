#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace gvb {

/// Which variables a polynomial matrix depends on.
enum class Signature { y, z, xy };

enum class Var { x, y, z };

/// Polynomial in at most two variables with nonnegative exponents.
///
/// Exponent slot `a` holds the power of x (bivariate) or z (univariate z);
/// slot `b` holds the power of y. Terms are kept sorted by (a, b) and merged,
/// and zero coefficients are never stored.
class Poly {
 public:
  struct Term {
    int a;
    int b;
    double coeff;
    bool operator==(const Term&) const = default;
  };

  Poly() = default;
  static Poly constant(double c) { return monomial(c, 0, 0); }
  static Poly monomial(double c, int a, int b);

  bool empty() const noexcept { return terms_.empty(); }
  const std::vector<Term>& terms() const noexcept { return terms_; }

  /// Value at (u, v) where u feeds slot a and v feeds slot b.
  double eval(double u, double v) const;

  /// Formal derivative in slot a (`in_a`) or slot b.
  Poly derivative(bool in_a, int order) const;

  /// Coefficient polynomial of u^k, returned with slot a cleared.
  Poly coefficient(int k) const;

  /// Partially evaluates slot a at `u`, leaving a polynomial in slot b.
  Poly fix_a(double u) const;

  int max_a() const noexcept;
  int max_b() const noexcept;

  Poly& operator+=(const Poly& other);
  friend Poly operator+(Poly lhs, const Poly& rhs) { return lhs += rhs; }
  Poly scaled(double factor) const;
  bool operator==(const Poly&) const = default;

  /// Terms rendered as `c*x^a*y^b` (variable names from the signature) joined by '+'.
  std::string to_string(Signature sig) const;

 private:
  void normalize();
  std::vector<Term> terms_;
};

/// Compressed sparse row matrix of doubles.
struct CsrMatrix {
  std::size_t n = 0;
  std::vector<std::size_t> row_ptr;  // n + 1 entries
  std::vector<std::size_t> col;
  std::vector<double> val;

  std::size_t nnz() const noexcept { return val.size(); }
  double at(std::size_t i, std::size_t j) const;
  std::vector<double> dense() const;  // row-major n*n
};

/// Square sparse matrix with polynomial entries.
class SparsePolyMatrix {
 public:
  SparsePolyMatrix(std::size_t n, Signature sig);

  std::size_t size() const noexcept { return rows_.size(); }
  Signature signature() const noexcept { return sig_; }

  /// Adds `p` to entry (i, j).
  void add(std::size_t i, std::size_t j, const Poly& p);

  /// Entry (i, j); empty polynomial when structurally zero.
  Poly entry(std::size_t i, std::size_t j) const;

  using Row = std::vector<std::pair<std::size_t, Poly>>;
  const Row& row(std::size_t i) const { return rows_.at(i); }
  std::size_t nnz() const noexcept;

  /// Numeric evaluation. Univariate signatures read only `first`; the
  /// bivariate signature reads (x, y) = (first, second). Negative values
  /// raise a domain error. Entries evaluating to exactly zero are dropped.
  CsrMatrix eval(double first, double second = 0.0) const;

  /// Entrywise derivative; zero entries are dropped from the sparsity.
  SparsePolyMatrix derivative(Var var, int order) const;

  /// For a bivariate matrix: the y-polynomial matrix multiplying x^k.
  SparsePolyMatrix coefficient_matrix(int k) const;

  /// For a bivariate matrix: substitute x, leaving a y-matrix.
  SparsePolyMatrix at_x(double x) const;

  int max_degree(Var var) const;

  bool operator==(const SparsePolyMatrix& other) const;

  /// One line per nonzero entry: `row col poly`.
  std::string dump() const;

 private:
  bool uses_slot_a(Var var) const;
  Signature sig_;
  std::vector<Row> rows_;
};

}  // namespace gvb
