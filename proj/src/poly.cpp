#include "schanuel/poly.hpp"

#include <stdexcept>

namespace schanuel {

IntPoly::IntPoly(std::vector<mpz_class> coeffs) : coeffs_(std::move(coeffs)) {
  while (!coeffs_.empty() && coeffs_.back() == 0) coeffs_.pop_back();
}

mpz_class IntPoly::content() const {
  mpz_class g = 0;
  for (const auto& c : coeffs_) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c.get_mpz_t());
  return g;
}

IntPoly IntPoly::primitive() const {
  if (is_zero()) return *this;
  mpz_class g = content();
  if (leading() < 0) g = -g;
  std::vector<mpz_class> out;
  out.reserve(coeffs_.size());
  for (const auto& c : coeffs_) out.push_back(c / g);
  return IntPoly(std::move(out));
}

IntPoly IntPoly::derivative() const {
  std::vector<mpz_class> out;
  for (std::size_t i = 1; i < coeffs_.size(); ++i) out.push_back(coeffs_[i] * static_cast<unsigned long>(i));
  return IntPoly(std::move(out));
}

IntPoly IntPoly::reflected() const {
  std::vector<mpz_class> out = coeffs_;
  for (std::size_t i = 1; i < out.size(); i += 2) out[i] = -out[i];
  return IntPoly(std::move(out));
}

IntPoly IntPoly::reversed() const {
  std::vector<mpz_class> out(coeffs_.rbegin(), coeffs_.rend());
  return IntPoly(std::move(out));
}

Ball IntPoly::evaluate(const Ball& x) const {
  Ball acc(x.precision());
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it)
    acc = acc * x + Ball::exact_integer(*it, x.precision());
  return acc;
}

std::pair<Ball, Ball> IntPoly::evaluate_with_derivative(const Ball& x) const {
  Ball value(x.precision());
  Ball slope(x.precision());
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
    slope = slope * x + value;
    value = value * x + Ball::exact_integer(*it, x.precision());
  }
  return {value, slope};
}

std::string IntPoly::key() const {
  std::string out;
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    if (i) out += ',';
    out += coeffs_[i].get_str();
  }
  return out;
}

std::string IntPoly::to_string() const {
  if (is_zero()) return "0";
  std::string out;
  for (int i = degree(); i >= 0; --i) {
    const mpz_class& c = coeffs_[static_cast<std::size_t>(i)];
    if (c == 0) continue;
    mpz_class a = abs(c);
    if (out.empty()) {
      if (c < 0) out += "-";
    } else {
      out += c < 0 ? " - " : " + ";
    }
    if (a != 1 || i == 0) out += a.get_str();
    if (i >= 1) out += "x";
    if (i >= 2) out += "^" + std::to_string(i);
  }
  return out;
}

RatPoly to_rational(const IntPoly& p) {
  RatPoly out;
  for (const auto& c : p.coeffs()) out.emplace_back(c);
  return out;
}

void trim(RatPoly& p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
}

IntPoly to_primitive_integer(const RatPoly& p) {
  mpz_class lcm = 1;
  for (const auto& c : p) mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(), c.get_den_mpz_t());
  std::vector<mpz_class> out;
  for (const auto& c : p) {
    mpq_class scaled = c * lcm;
    out.push_back(scaled.get_num());
  }
  return IntPoly(std::move(out)).primitive();
}

std::pair<RatPoly, RatPoly> divmod(const RatPoly& a, const RatPoly& b) {
  RatPoly divisor = b;
  trim(divisor);
  if (divisor.empty()) throw std::domain_error("polynomial division by zero");
  RatPoly rem = a;
  trim(rem);
  if (rem.size() < divisor.size()) return {{}, rem};
  RatPoly quot(rem.size() - divisor.size() + 1);
  const mpq_class& lead = divisor.back();
  while (!rem.empty() && rem.size() >= divisor.size()) {
    const std::size_t shift = rem.size() - divisor.size();
    mpq_class factor = rem.back() / lead;
    quot[shift] = factor;
    for (std::size_t i = 0; i < divisor.size(); ++i) rem[shift + i] -= factor * divisor[i];
    rem.pop_back();
    trim(rem);
  }
  trim(quot);
  return {quot, rem};
}

RatPoly gcd(RatPoly a, RatPoly b) {
  trim(a);
  trim(b);
  while (!b.empty()) {
    RatPoly r = divmod(a, b).second;
    a = std::move(b);
    b = std::move(r);
  }
  if (!a.empty()) {
    mpq_class lead = a.back();
    for (auto& c : a) c /= lead;
  }
  return a;
}

bool divides(const IntPoly& b, const IntPoly& a) {
  return divmod(to_rational(a), to_rational(b)).second.empty();
}

IntPoly exact_quotient(const IntPoly& a, const IntPoly& b) {
  auto [q, r] = divmod(to_rational(a), to_rational(b));
  if (!r.empty()) throw std::domain_error("polynomial division is not exact");
  return to_primitive_integer(q);
}

IntPoly squarefree_part(const IntPoly& p) {
  if (p.degree() <= 1) return p.primitive();
  RatPoly g = gcd(to_rational(p), to_rational(p.derivative()));
  if (g.size() <= 1) return p.primitive();
  return to_primitive_integer(divmod(to_rational(p), g).first);
}

IntPoly shifted(const IntPoly& p, const mpq_class& shift) {
  RatPoly acc;
  for (auto it = p.coeffs().rbegin(); it != p.coeffs().rend(); ++it) {
    // acc = acc * (x - shift) + c
    RatPoly next(acc.size() + 1);
    for (std::size_t i = 0; i < acc.size(); ++i) {
      next[i + 1] += acc[i];
      next[i] -= acc[i] * shift;
    }
    next[0] += *it;
    acc = std::move(next);
  }
  trim(acc);
  return to_primitive_integer(acc);
}

IntPoly scaled_roots(const IntPoly& p, const mpq_class& factor) {
  if (factor == 0) throw std::domain_error("scaling roots by zero");
  RatPoly out;
  const int d = p.degree();
  for (int i = 0; i <= d; ++i) {
    mpq_class power = 1;
    for (int k = 0; k < d - i; ++k) power *= factor;
    out.push_back(mpq_class(p[static_cast<std::size_t>(i)]) * power);
  }
  return to_primitive_integer(out);
}

RatMatrix companion(const IntPoly& p) {
  const std::size_t d = static_cast<std::size_t>(p.degree());
  RatMatrix m(d, std::vector<mpq_class>(d));
  for (std::size_t i = 1; i < d; ++i) m[i][i - 1] = 1;
  for (std::size_t i = 0; i < d; ++i) m[i][d - 1] = -mpq_class(p[i]) / mpq_class(p.leading());
  return m;
}

RatMatrix kronecker_sum(const RatMatrix& a, const RatMatrix& b) {
  const std::size_t n = a.size(), m = b.size();
  RatMatrix out(n * m, std::vector<mpq_class>(n * m));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (a[i][j] != 0)
        for (std::size_t k = 0; k < m; ++k) out[i * m + k][j * m + k] += a[i][j];
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < m; ++k)
      for (std::size_t l = 0; l < m; ++l)
        if (b[k][l] != 0) out[i * m + k][i * m + l] += b[k][l];
  return out;
}

RatMatrix kronecker_product(const RatMatrix& a, const RatMatrix& b) {
  const std::size_t n = a.size(), m = b.size();
  RatMatrix out(n * m, std::vector<mpq_class>(n * m));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (a[i][j] != 0)
        for (std::size_t k = 0; k < m; ++k)
          for (std::size_t l = 0; l < m; ++l) out[i * m + k][j * m + l] = a[i][j] * b[k][l];
  return out;
}

namespace {

RatMatrix multiply(const RatMatrix& a, const RatMatrix& b) {
  const std::size_t n = a.size();
  RatMatrix out(n, std::vector<mpq_class>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k)
      if (a[i][k] != 0)
        for (std::size_t j = 0; j < n; ++j) out[i][j] += a[i][k] * b[k][j];
  return out;
}

}  // namespace

RatMatrix matrix_power(const RatMatrix& a, unsigned long exponent) {
  const std::size_t n = a.size();
  RatMatrix result(n, std::vector<mpq_class>(n));
  for (std::size_t i = 0; i < n; ++i) result[i][i] = 1;
  RatMatrix base = a;
  while (exponent != 0) {
    if (exponent & 1UL) result = multiply(result, base);
    exponent >>= 1;
    if (exponent != 0) base = multiply(base, base);
  }
  return result;
}

RatPoly characteristic_polynomial(const RatMatrix& input) {
  RatMatrix h = input;
  const std::size_t n = h.size();
  // Similarity reduction to upper Hessenberg form.
  for (std::size_t j = 0; j + 2 < n; ++j) {
    std::size_t pivot = j + 1;
    while (pivot < n && h[pivot][j] == 0) ++pivot;
    if (pivot == n) continue;
    if (pivot != j + 1) {
      std::swap(h[pivot], h[j + 1]);
      for (std::size_t r = 0; r < n; ++r) std::swap(h[r][pivot], h[r][j + 1]);
    }
    for (std::size_t r = j + 2; r < n; ++r) {
      if (h[r][j] == 0) continue;
      mpq_class u = h[r][j] / h[j + 1][j];
      for (std::size_t c = 0; c < n; ++c) h[r][c] -= u * h[j + 1][c];
      for (std::size_t c = 0; c < n; ++c) h[c][j + 1] += u * h[c][r];
    }
  }
  std::vector<RatPoly> p(n + 1);
  p[0] = {mpq_class(1)};
  for (std::size_t m = 1; m <= n; ++m) {
    RatPoly next(m + 1);
    for (std::size_t i = 0; i < p[m - 1].size(); ++i) {
      next[i + 1] += p[m - 1][i];
      next[i] -= h[m - 1][m - 1] * p[m - 1][i];
    }
    mpq_class t = 1;
    for (std::size_t i = m - 1; i >= 1; --i) {
      t *= h[i][i - 1];
      if (t == 0) break;
      mpq_class coeff = h[i - 1][m - 1] * t;
      for (std::size_t k = 0; k < p[i - 1].size(); ++k) next[k] -= coeff * p[i - 1][k];
    }
    trim(next);
    p[m] = std::move(next);
  }
  return p[n];
}

}  // namespace schanuel
