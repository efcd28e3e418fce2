#include "paqs/permanent.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "paqs/error.hpp"

namespace paqs {

namespace {

int checked_order(const ComplexMatrix& m, int ceiling, const char* name) {
  require(m.rows() >= 1 && m.rows() == m.cols(), ErrorKind::InvalidArgument, "permanent needs a non-empty square matrix");
  require(m.allFinite(), ErrorKind::Domain, "matrix has non-finite entries");
  const int n = static_cast<int>(m.rows());
  require(n <= ceiling, ErrorKind::Limit,
          std::string(name) + " refuses order " + std::to_string(n) + " (ceiling " + std::to_string(ceiling) + ")");
  return n;
}

// Plain or Kahan-compensated complex accumulator.
class Accumulator {
 public:
  explicit Accumulator(bool compensated) : compensated_(compensated) {}

  void add(Complex x) {
    if (!compensated_) {
      sum_ += x;
      return;
    }
    const Complex y = x - carry_;
    const Complex t = sum_ + y;
    carry_ = (t - sum_) - y;
    sum_ = t;
  }
  Complex value() const { return sum_; }

 private:
  bool compensated_;
  Complex sum_{0.0, 0.0};
  Complex carry_{0.0, 0.0};
};

void record(PermanentStats* stats, PermanentAlgorithm route, std::uint64_t terms) {
  if (stats) {
    stats->route = route;
    stats->terms = terms;
  }
}

// Plain complex product; skips the inf/nan recovery path of operator*.
Complex product(const std::vector<Complex>& v) {
  double re = v[0].real(), im = v[0].imag();
  for (std::size_t k = 1; k < v.size(); ++k) {
    const double r = re * v[k].real() - im * v[k].imag();
    im = re * v[k].imag() + im * v[k].real();
    re = r;
  }
  return {re, im};
}

// Row-major copy so the Gray updates stream through one contiguous row.
std::vector<Complex> row_major(const ComplexMatrix& m) {
  const auto n = static_cast<std::size_t>(m.rows());
  std::vector<Complex> rows(n * n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = 0; k < n; ++k) rows[j * n + k] = m(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k));
  return rows;
}

}  // namespace

const char* to_string(PermanentAlgorithm algo) noexcept {
  switch (algo) {
    case PermanentAlgorithm::Naive: return "naive";
    case PermanentAlgorithm::Ryser: return "ryser";
    case PermanentAlgorithm::RyserGray: return "ryser_gray";
    case PermanentAlgorithm::Glynn: return "glynn";
    case PermanentAlgorithm::GlynnGray: return "glynn_gray";
    case PermanentAlgorithm::Dispatch: return "dispatch";
  }
  return "unknown";
}

PermanentAlgorithm permanent_algorithm_from_string(const std::string& name) {
  for (auto a : {PermanentAlgorithm::Naive, PermanentAlgorithm::Ryser, PermanentAlgorithm::RyserGray,
                 PermanentAlgorithm::Glynn, PermanentAlgorithm::GlynnGray, PermanentAlgorithm::Dispatch})
    if (name == to_string(a)) return a;
  fail(ErrorKind::InvalidArgument, "unknown permanent algorithm '" + name + "'");
}

Complex permanent_naive(const ComplexMatrix& m, PermanentStats* stats) {
  const int n = checked_order(m, kNaiveMaxOrder, "naive permanent");
  std::vector<int> sigma(static_cast<std::size_t>(n));
  std::iota(sigma.begin(), sigma.end(), 0);
  Complex sum{0.0, 0.0};
  std::uint64_t terms = 0;
  do {
    Complex p{1.0, 0.0};
    for (int i = 0; i < n; ++i) p *= m(i, sigma[static_cast<std::size_t>(i)]);
    sum += p;
    ++terms;
  } while (std::next_permutation(sigma.begin(), sigma.end()));
  record(stats, PermanentAlgorithm::Naive, terms);
  return sum;
}

// Per M = (-1)^n sum_{eps != 0} (-1)^{|eps|} prod_k sum_j eps_j M_jk.
// The eps = 0 term vanishes and is skipped.
Complex permanent_ryser(const ComplexMatrix& m, PermanentStats* stats) {
  const int n = checked_order(m, kInclusionExclusionMaxOrder, "Ryser permanent");
  Accumulator acc(n >= kCompensatedFromOrder);
  std::vector<Complex> lambda(static_cast<std::size_t>(n));
  const std::uint64_t subsets = std::uint64_t{1} << n;
  for (std::uint64_t eps = 1; eps < subsets; ++eps) {
    for (int k = 0; k < n; ++k) {
      Complex s{0.0, 0.0};
      for (int j = 0; j < n; ++j)
        if (eps >> j & 1) s += m(j, k);
      lambda[static_cast<std::size_t>(k)] = s;
    }
    const Complex term = product(lambda);
    acc.add(std::popcount(eps) & 1 ? -term : term);
  }
  record(stats, PermanentAlgorithm::Ryser, subsets - 1);
  return n & 1 ? -acc.value() : acc.value();
}

// Same sum, with eps visited in binary-reflected Gray order so each step
// flips one row in or out of lambda.
Complex permanent_ryser_gray(const ComplexMatrix& m, PermanentStats* stats) {
  const int n = checked_order(m, kInclusionExclusionMaxOrder, "Ryser+Gray permanent");
  const auto un = static_cast<std::size_t>(n);
  const auto rows = row_major(m);
  Accumulator acc(n >= kCompensatedFromOrder);
  std::vector<Complex> lambda(un, Complex{0.0, 0.0});
  std::uint64_t members = 0;
  const std::uint64_t subsets = std::uint64_t{1} << n;
  bool odd = false;
  for (std::uint64_t step = 1; step < subsets; ++step) {
    const int row = std::countr_zero(step);
    members ^= std::uint64_t{1} << row;
    odd = !odd;
    const Complex* r = &rows[static_cast<std::size_t>(row) * un];
    if (members >> row & 1) {
      for (std::size_t k = 0; k < un; ++k) lambda[k] += r[k];
    } else {
      for (std::size_t k = 0; k < un; ++k) lambda[k] -= r[k];
    }
    const Complex term = product(lambda);
    acc.add(odd ? -term : term);
  }
  record(stats, PermanentAlgorithm::RyserGray, subsets - 1);
  return n & 1 ? -acc.value() : acc.value();
}

// Per M = 2^{1-n} sum_{delta, delta_1 = +1} (prod_i delta_i) prod_k sum_j delta_j M_jk.
Complex permanent_glynn(const ComplexMatrix& m, PermanentStats* stats) {
  const int n = checked_order(m, kInclusionExclusionMaxOrder, "Glynn permanent");
  Accumulator acc(n >= kCompensatedFromOrder);
  std::vector<Complex> lambda(static_cast<std::size_t>(n));
  const std::uint64_t patterns = std::uint64_t{1} << (n - 1);
  for (std::uint64_t bits = 0; bits < patterns; ++bits) {
    // bit j-1 set means delta_j = -1 for rows 2..n (0-based j >= 1)
    for (int k = 0; k < n; ++k) {
      Complex s = m(0, k);
      for (int j = 1; j < n; ++j) s += (bits >> (j - 1) & 1) ? -m(j, k) : m(j, k);
      lambda[static_cast<std::size_t>(k)] = s;
    }
    const Complex term = product(lambda);
    acc.add(std::popcount(bits) & 1 ? -term : term);
  }
  record(stats, PermanentAlgorithm::Glynn, patterns);
  return acc.value() / std::ldexp(1.0, n - 1);
}

Complex permanent_glynn_gray(const ComplexMatrix& m, PermanentStats* stats) {
  const int n = checked_order(m, kInclusionExclusionMaxOrder, "Glynn+Gray permanent");
  const auto un = static_cast<std::size_t>(n);
  const auto rows = row_major(m);
  Accumulator acc(n >= kCompensatedFromOrder);
  std::vector<Complex> lambda(un);
  for (std::size_t k = 0; k < un; ++k) {
    Complex s{0.0, 0.0};
    for (std::size_t j = 0; j < un; ++j) s += rows[j * un + k];
    lambda[k] = s;
  }
  std::uint64_t negated = 0;  // bit j set: delta_{j+1} = -1
  const std::uint64_t patterns = std::uint64_t{1} << (n - 1);
  acc.add(product(lambda));
  bool odd = false;
  for (std::uint64_t step = 1; step < patterns; ++step) {
    const int row = std::countr_zero(step) + 1;
    negated ^= std::uint64_t{1} << row;
    odd = !odd;
    const Complex* r = &rows[static_cast<std::size_t>(row) * un];
    if (negated >> row & 1) {
      for (std::size_t k = 0; k < un; ++k) lambda[k] -= 2.0 * r[k];
    } else {
      for (std::size_t k = 0; k < un; ++k) lambda[k] += 2.0 * r[k];
    }
    const Complex term = product(lambda);
    acc.add(odd ? -term : term);
  }
  record(stats, PermanentAlgorithm::GlynnGray, patterns);
  return acc.value() / std::ldexp(1.0, n - 1);
}

PermanentAlgorithm dispatch_route(int order, int threshold) {
  return order < threshold ? PermanentAlgorithm::RyserGray : PermanentAlgorithm::GlynnGray;
}

Complex permanent(const ComplexMatrix& m, PermanentStats* stats, int threshold) {
  if (dispatch_route(static_cast<int>(m.rows()), threshold) == PermanentAlgorithm::RyserGray)
    return permanent_ryser_gray(m, stats);
  return permanent_glynn_gray(m, stats);
}

Complex permanent(const ComplexMatrix& m, PermanentAlgorithm algo, PermanentStats* stats) {
  switch (algo) {
    case PermanentAlgorithm::Naive: return permanent_naive(m, stats);
    case PermanentAlgorithm::Ryser: return permanent_ryser(m, stats);
    case PermanentAlgorithm::RyserGray: return permanent_ryser_gray(m, stats);
    case PermanentAlgorithm::Glynn: return permanent_glynn(m, stats);
    case PermanentAlgorithm::GlynnGray: return permanent_glynn_gray(m, stats);
    case PermanentAlgorithm::Dispatch: return permanent(m, stats);
  }
  fail(ErrorKind::InvalidArgument, "unknown permanent algorithm");
}

Complex determinant(const ComplexMatrix& m) {
  require(m.rows() >= 1 && m.rows() == m.cols(), ErrorKind::InvalidArgument, "determinant needs a non-empty square matrix");
  ComplexMatrix a = m;
  const Eigen::Index n = a.rows();
  Complex det{1.0, 0.0};
  for (Eigen::Index c = 0; c < n; ++c) {
    Eigen::Index pivot = c;
    for (Eigen::Index r = c + 1; r < n; ++r)
      if (std::abs(a(r, c)) > std::abs(a(pivot, c))) pivot = r;
    if (a(pivot, c) == Complex{0.0, 0.0}) return {0.0, 0.0};
    if (pivot != c) {
      a.row(pivot).swap(a.row(c));
      det = -det;
    }
    det *= a(c, c);
    for (Eigen::Index r = c + 1; r < n; ++r) {
      const Complex f = a(r, c) / a(c, c);
      if (f == Complex{0.0, 0.0}) continue;
      a.row(r).tail(n - c - 1) -= f * a.row(c).tail(n - c - 1);
    }
  }
  return det;
}

}  // namespace paqs
