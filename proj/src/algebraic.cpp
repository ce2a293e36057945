#include "schanuel/algebraic.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <sstream>

namespace schanuel {

namespace {

constexpr mpfr_prec_t kBasePrecision = 128;
constexpr mpfr_prec_t kMaxPrecision = 1 << 16;
constexpr std::size_t kFactorSearchBudget = 1u << 20;

Ball point(const Ball& b) { return Ball::from_parts(b.re(), b.im(), Float(Ball::kRadiusPrecision), b.precision()); }

Ball disc(const Ball& center, const Float& radius) {
  return Ball::from_parts(center.re(), center.im(), radius, center.precision());
}

Float radius_for(const Ball& z, long bits) {
  // 2^-bits * (1 + |z|)
  Float out = z.abs_upper();
  mpfr_add_ui(out.get(), out.get(), 1, MPFR_RNDU);
  mpfr_mul_2si(out.get(), out.get(), -bits, MPFR_RNDU);
  return out;
}

Ball polish(const IntPoly& f, Ball z, int steps) {
  for (int i = 0; i < steps; ++i) {
    auto [v, dv] = f.evaluate_with_derivative(z);
    if (point(v).contains_zero()) break;
    Ball dvp = point(dv);
    if (dvp.contains_zero()) break;
    z = point(z - point(v) * inverse(dvp));
  }
  return z;
}

std::optional<Ball> krawczyk(const IntPoly& f, const IntPoly& df, const Ball& center, const Float& r) {
  const mpfr_prec_t p = center.precision();
  auto [fc, dfc] = f.evaluate_with_derivative(center);
  Ball slope = point(dfc);
  if (slope.contains_zero()) return std::nullopt;
  Ball y = point(inverse(slope));
  Ball x = disc(center, r);
  Ball dfx = df.evaluate(x);
  Ball delta = disc(Ball(p), r);
  Ball k = center - y * fc + (Ball::exact_integer(1, p) - y * dfx) * delta;
  Float shrunk(Ball::kRadiusPrecision);
  mpfr_mul_d(shrunk.get(), r.get(), 1.0 - 1.0 / 1024.0, MPFR_RNDD);
  if (disc(center, shrunk).contains(k)) return x;
  return std::nullopt;
}

std::optional<Ball> certify_near(const IntPoly& f, const IntPoly& df, const Ball& z0, int polish_steps) {
  const mpfr_prec_t p = z0.precision();
  Ball z = polish(f, point(z0), polish_steps);
  auto [v, dv] = f.evaluate_with_derivative(z);
  Float step(Ball::kRadiusPrecision);
  Ball dvp = point(dv);
  if (dvp.contains_zero()) return std::nullopt;
  Ball ratio = point(v) * inverse(dvp);
  step = ratio.abs_upper();
  mpfr_mul_ui(step.get(), step.get(), 8, MPFR_RNDU);
  Float floor_r = radius_for(z, static_cast<long>(p) - 24);
  Float r(Ball::kRadiusPrecision);
  mpfr_max(r.get(), step.get(), floor_r.get(), MPFR_RNDU);
  for (int attempt = 0; attempt < 5; ++attempt) {
    try {
      if (auto ok = krawczyk(f, df, z, r)) return ok;
    } catch (const BallError&) {
    }
    mpfr_mul_ui(r.get(), r.get(), 16, MPFR_RNDU);
  }
  return std::nullopt;
}

std::vector<Ball> aberth(const IntPoly& f, mpfr_prec_t p) {
  const int d = f.degree();
  // Initial radius: geometric mean of the root moduli, at least 1e-3.
  double log_rho = 0.0;
  if (f[0] != 0) {
    long e0 = 0, ed = 0;
    double m0 = mpz_get_d_2exp(&e0, f[0].get_mpz_t());
    double md = mpz_get_d_2exp(&ed, f.leading().get_mpz_t());
    log_rho = (std::log2(std::fabs(m0)) + e0 - std::log2(std::fabs(md)) - ed) / d;
  }
  log_rho = std::max(log_rho, -10.0);
  std::vector<Ball> z;
  z.reserve(static_cast<std::size_t>(d));
  for (int k = 0; k < d; ++k) {
    const double angle = 2.0 * M_PI * k / d + 0.4;
    Float re(p), im(p), zero(Ball::kRadiusPrecision);
    mpfr_set_d(re.get(), std::cos(angle), MPFR_RNDN);
    mpfr_set_d(im.get(), std::sin(angle), MPFR_RNDN);
    mpfr_mul_2si(re.get(), re.get(), 0, MPFR_RNDN);
    Float scale(p);
    mpfr_set_d(scale.get(), log_rho, MPFR_RNDN);
    mpfr_ui_pow(scale.get(), 2, scale.get(), MPFR_RNDN);
    mpfr_mul(re.get(), re.get(), scale.get(), MPFR_RNDN);
    mpfr_mul(im.get(), im.get(), scale.get(), MPFR_RNDN);
    z.push_back(Ball::from_parts(re, im, zero, p));
  }
  const int max_iter = 200 + 40 * d + static_cast<int>(p / 4);
  for (int iter = 0; iter < max_iter; ++iter) {
    bool converged = true;
    for (int k = 0; k < d; ++k) {
      auto [v, dv] = f.evaluate_with_derivative(z[static_cast<std::size_t>(k)]);
      Ball vp = point(v);
      if (vp.contains_zero()) continue;
      Ball dvp = point(dv);
      if (dvp.contains_zero()) {
        // Nudge off a critical point.
        Float tiny = radius_for(z[static_cast<std::size_t>(k)], 8);
        z[static_cast<std::size_t>(k)] = point(z[static_cast<std::size_t>(k)] + disc(Ball(p), Float(Ball::kRadiusPrecision)) +
                                              Ball::from_parts(tiny, tiny, Float(Ball::kRadiusPrecision), p));
        converged = false;
        continue;
      }
      Ball ratio = point(vp * inverse(dvp));
      Ball sum(p);
      for (int j = 0; j < d; ++j) {
        if (j == k) continue;
        Ball diff = point(z[static_cast<std::size_t>(k)] - z[static_cast<std::size_t>(j)]);
        if (diff.contains_zero()) continue;
        sum = point(sum + inverse(diff));
      }
      Ball denom = point(Ball::exact_integer(1, p) - ratio * sum);
      if (denom.contains_zero()) continue;
      Ball w = point(ratio * inverse(denom));
      z[static_cast<std::size_t>(k)] = point(z[static_cast<std::size_t>(k)] - w);
      Float size = w.abs_upper();
      Float tol = radius_for(z[static_cast<std::size_t>(k)], static_cast<long>(p) - 12);
      if (mpfr_cmp(size.get(), tol.get()) > 0) converged = false;
    }
    if (converged) break;
  }
  return z;
}

Ball refine_disc(const IntPoly& f, const Ball& current, mpfr_prec_t prec) {
  if (current.precision() >= prec) return current;
  const IntPoly df = f.derivative();
  for (mpfr_prec_t p = prec; p <= std::max(prec * 4, kMaxPrecision); p *= 2) {
    Ball start = current.with_precision(p);
    int steps = 4;
    for (mpfr_prec_t q = current.precision(); q < p; q *= 2) ++steps;
    if (auto refined = certify_near(f, df, start, steps)) {
      if (current.contains(*refined)) return *refined;
    }
  }
  return current;
}

mpq_class to_rational(const Float& x) {
  mpq_class out;
  mpfr_get_q(out.get_mpq_t(), x.get());
  return out;
}

mpq_class floor_digits(const mpq_class& x, const mpz_class& scale) {
  mpz_class n = x.get_num() * scale;
  mpz_class q;
  mpz_fdiv_q(q.get_mpz_t(), n.get_mpz_t(), x.get_den_mpz_t());
  return mpq_class(q, scale);
}

mpq_class ceil_digits(const mpq_class& x, const mpz_class& scale) {
  mpz_class n = x.get_num() * scale;
  mpz_class q;
  mpz_cdiv_q(q.get_mpz_t(), n.get_mpz_t(), x.get_den_mpz_t());
  return mpq_class(q, scale);
}

// Rectangle [c - r, c + r]^2 with corners rounded outward to 10^-digits.
RationalBox decimal_box(const Ball& d, int digits) {
  const mpfr_prec_t p = d.precision() + Ball::kRadiusPrecision + 2;
  Float lo(p), hi(p);
  mpz_class scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(digits));
  RationalBox box;
  mpfr_sub(lo.get(), d.re().get(), d.radius().get(), MPFR_RNDD);
  mpfr_add(hi.get(), d.re().get(), d.radius().get(), MPFR_RNDU);
  box.re_lo = floor_digits(to_rational(lo), scale);
  box.re_hi = ceil_digits(to_rational(hi), scale);
  mpfr_sub(lo.get(), d.im().get(), d.radius().get(), MPFR_RNDD);
  mpfr_add(hi.get(), d.im().get(), d.radius().get(), MPFR_RNDU);
  box.im_lo = floor_digits(to_rational(lo), scale);
  box.im_hi = ceil_digits(to_rational(hi), scale);
  return box;
}

RationalBox exact_box(const Ball& d) {
  const mpfr_prec_t p = d.precision() + Ball::kRadiusPrecision + 2;
  Float lo(p), hi(p);
  RationalBox box;
  mpfr_sub(lo.get(), d.re().get(), d.radius().get(), MPFR_RNDD);
  mpfr_add(hi.get(), d.re().get(), d.radius().get(), MPFR_RNDU);
  box.re_lo = to_rational(lo);
  box.re_hi = to_rational(hi);
  mpfr_sub(lo.get(), d.im().get(), d.radius().get(), MPFR_RNDD);
  mpfr_add(hi.get(), d.im().get(), d.radius().get(), MPFR_RNDU);
  box.im_lo = to_rational(lo);
  box.im_hi = to_rational(hi);
  return box;
}

bool radius_below(const Ball& b, const mpq_class& bound) {
  return mpfr_cmp_q(b.radius().get(), bound.get_mpq_t()) < 0;
}

struct RootSet {
  IntPoly poly;
  std::vector<Ball> discs;
};

struct Entry {
  IntPoly poly;
  std::size_t index = 0;
  std::shared_ptr<RootSet> roots;
  std::optional<std::string> name;
  RationalBox canonical;
  Ball best{kBasePrecision};
};

class Store {
 public:
  static Store& instance() {
    static Store store;
    return store;
  }

  std::recursive_mutex mutex;
  int cap = 64;

  std::shared_ptr<RootSet> roots_of(const IntPoly& sqf) {
    std::lock_guard lock(mutex);
    auto it = rootsets_.find(sqf.key());
    if (it != rootsets_.end()) return it->second;
    auto rs = std::make_shared<RootSet>();
    rs->poly = sqf;
    rs->discs = isolate_roots(sqf);
    rootsets_.emplace(sqf.key(), rs);
    return rs;
  }

  AlgebraicId intern(const IntPoly& minpoly, std::size_t index) {
    std::lock_guard lock(mutex);
    auto key = std::make_pair(minpoly.key(), index);
    auto it = by_key_.find(key);
    if (it != by_key_.end()) return AlgebraicId{it->second};
    Entry e;
    e.poly = minpoly;
    e.index = index;
    e.roots = roots_of(minpoly);
    e.best = e.roots->discs[index];
    e.canonical = compute_canonical(*e.roots, index, e.best);
    const auto id = static_cast<std::uint32_t>(entries_.size());
    entries_.push_back(std::move(e));
    by_key_.emplace(key, id);
    return AlgebraicId{id};
  }

  Entry& entry(AlgebraicId id) {
    std::lock_guard lock(mutex);
    if (id.index >= entries_.size()) throw std::out_of_range("unknown algebraic constant");
    return entries_[id.index];
  }

  void name(const std::string& name, AlgebraicId id, bool builtin) {
    std::lock_guard lock(mutex);
    auto it = by_name_.find(name);
    if (it != by_name_.end()) {
      if (it->second == id.index) return;
      throw std::invalid_argument("algebraic constant name already bound: " + name);
    }
    by_name_.emplace(name, id.index);
    Entry& e = entries_[id.index];
    if (!e.name) e.name = name;
    if (!builtin) user_order_.push_back(name);
  }

  std::optional<AlgebraicId> find_name(const std::string& name) {
    std::lock_guard lock(mutex);
    ensure_builtins();
    auto it = by_name_.find(name);
    if (it == by_name_.end()) return std::nullopt;
    return AlgebraicId{it->second};
  }

  std::vector<std::string> user_names() {
    std::lock_guard lock(mutex);
    return user_order_;
  }

  void ensure_builtins() {
    if (builtins_done_) return;
    builtins_done_ = true;
    RationalBox i_box{mpq_class(-1, 2), mpq_class(1, 2), mpq_class(1, 2), mpq_class(3, 2)};
    name("i", make_algebraic(IntPoly({1, 0, 1}), i_box).id(), true);
    RationalBox s_box{mpq_class(1), mpq_class(2), mpq_class(-1, 2), mpq_class(1, 2)};
    name("sqrt2", make_algebraic(IntPoly({-2, 0, 1}), s_box).id(), true);
  }

 private:
  Store() = default;

  static RationalBox compute_canonical(const RootSet& rs, std::size_t index, Ball& best) {
    if (rs.poly.degree() == 1) {
      mpq_class q(-rs.poly[0], rs.poly[1]);
      return RationalBox{q, q, 0, 0};
    }
    for (int digits = 1; digits < 4000; ++digits) {
      mpq_class target(1, 8);
      mpz_class scale;
      mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(digits));
      target /= scale;
      mpfr_prec_t p = best.precision();
      while (!radius_below(best, target) && p < kMaxPrecision) {
        p *= 2;
        best = refine_disc(rs.poly, best, p);
      }
      RationalBox box = decimal_box(best, digits);
      bool isolating = true;
      for (std::size_t j = 0; j < rs.discs.size(); ++j) {
        if (j == index) continue;
        if (!rs.discs[j].outside_box(box.re_lo, box.re_hi, box.im_lo, box.im_hi)) {
          isolating = false;
          break;
        }
      }
      if (isolating) return box;
    }
    throw AlgebraicError(AlgebraicError::Kind::Isolation, "could not build an isolating box");
  }

  std::map<std::string, std::shared_ptr<RootSet>> rootsets_;
  std::deque<Entry> entries_;
  std::map<std::pair<std::string, std::size_t>, std::uint32_t> by_key_;
  std::map<std::string, std::uint32_t> by_name_;
  std::vector<std::string> user_order_;
  bool builtins_done_ = false;
};

Store& store() { return Store::instance(); }

// Index of the unique disc in `rs` compatible with the target enclosure.
std::size_t identify(RootSet& rs, const std::function<Ball(mpfr_prec_t)>& target) {
  for (mpfr_prec_t p = kBasePrecision; p <= kMaxPrecision; p *= 2) {
    Ball t = target(p);
    std::vector<std::size_t> hits;
    for (std::size_t j = 0; j < rs.discs.size(); ++j) {
      if (rs.discs[j].precision() < p) rs.discs[j] = refine_disc(rs.poly, rs.discs[j], p);
      if (rs.discs[j].overlaps(t)) hits.push_back(j);
    }
    if (hits.size() == 1) return hits.front();
    if (hits.empty())
      throw AlgebraicError(AlgebraicError::Kind::Isolation, "target value matches no root of its polynomial");
  }
  throw AlgebraicError(AlgebraicError::Kind::Isolation, "could not separate the target root");
}

bool next_combination(std::vector<std::size_t>& idx, std::size_t n) {
  const std::size_t k = idx.size();
  for (std::size_t i = k; i-- > 0;) {
    if (idx[i] < n - k + i) {
      ++idx[i];
      for (std::size_t j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
      return true;
    }
  }
  return false;
}

struct FactorSearch {
  std::size_t work = 0;

  IntPoly run(const IntPoly& poly, std::vector<Ball> discs, std::size_t target) {
    const std::size_t n = discs.size();
    if (n <= 1) return poly;

    // Enough precision to round lc * prod(x - r) coefficients exactly.
    double bits = static_cast<double>(mpz_sizeinbase(poly.leading().get_mpz_t(), 2));
    for (const auto& d : discs) bits += std::log2(1.0 + std::fabs(d.abs_upper().to_double()));
    const mpfr_prec_t need = static_cast<mpfr_prec_t>(bits) + 96;
    for (auto& d : discs)
      if (d.precision() < need) d = refine_disc(poly, d, need);
    const mpfr_prec_t p = std::max<mpfr_prec_t>(need, discs.front().precision());
    const Ball lead = Ball::exact_integer(poly.leading(), p);

    for (std::size_t s = 1; s <= n / 2; ++s) {
      std::vector<std::size_t> idx(s);
      std::iota(idx.begin(), idx.end(), 0);
      do {
        if (++work > kFactorSearchBudget)
          throw AlgebraicError(AlgebraicError::Kind::DegreeCap, "factor search budget exhausted");
        if (auto g = candidate(poly, discs, idx, lead)) {
          const bool has_target = std::find(idx.begin(), idx.end(), target) != idx.end();
          std::vector<Ball> inside, outside;
          std::size_t t_in = 0, t_out = 0;
          for (std::size_t j = 0; j < n; ++j) {
            const bool in = std::find(idx.begin(), idx.end(), j) != idx.end();
            if (j == target) (in ? t_in : t_out) = (in ? inside.size() : outside.size());
            (in ? inside : outside).push_back(discs[j]);
          }
          if (has_target) return run(*g, inside, t_in);
          return run(exact_quotient(poly, *g), outside, t_out);
        }
      } while (next_combination(idx, n));
    }
    return poly;
  }

  static bool near_integer(const Ball& c, mpz_class& out) {
    if (!c.contains_zero() && mpfr_cmpabs(c.im().get(), c.radius().get()) > 0) return false;
    mpfr_get_z(out.get_mpz_t(), c.re().get(), MPFR_RNDN);
    Ball k = Ball::exact_integer(out, c.precision());
    return Ball::from_parts(c.re(), Float(c.precision()), c.radius(), c.precision()).overlaps(k) &&
           mpfr_cmp_d(c.radius().get(), 0.25) < 0;
  }

  static std::optional<IntPoly> candidate(const IntPoly& poly, const std::vector<Ball>& discs,
                                          const std::vector<std::size_t>& idx, const Ball& lead) {
    const mpfr_prec_t p = lead.precision();
    Ball trace(p);
    for (auto j : idx) trace = trace + discs[j];
    trace = lead * trace;
    mpz_class k;
    if (!near_integer(trace, k)) return std::nullopt;

    std::vector<Ball> coeffs{lead};
    for (auto j : idx) {
      std::vector<Ball> next(coeffs.size() + 1, Ball(p));
      for (std::size_t i = 0; i < coeffs.size(); ++i) {
        next[i + 1] = next[i + 1] + coeffs[i];
        next[i] = next[i] - coeffs[i] * discs[j];
      }
      coeffs = std::move(next);
    }
    std::vector<mpz_class> ints(coeffs.size());
    for (std::size_t i = 0; i < coeffs.size(); ++i)
      if (!near_integer(coeffs[i], ints[i])) return std::nullopt;
    IntPoly g = IntPoly(ints).primitive();
    if (g.degree() != static_cast<int>(idx.size()) || !divides(g, poly)) return std::nullopt;
    for (std::size_t j = 0; j < discs.size(); ++j) {
      if (std::find(idx.begin(), idx.end(), j) != idx.end()) continue;
      if (g.evaluate(discs[j]).contains_zero()) return std::nullopt;
    }
    return g;
  }
};

IntPoly minimal_factor_of(const IntPoly& poly, const std::function<Ball(mpfr_prec_t)>& target,
                          std::size_t* index_out = nullptr) {
  IntPoly sqf = squarefree_part(poly);
  auto rs = store().roots_of(sqf);
  RootSet local = *rs;
  const std::size_t t = identify(local, target);
  FactorSearch search;
  IntPoly m = search.run(sqf, local.discs, t);
  if (index_out) *index_out = t;
  return m;
}

AlgebraicConst from_minpoly(const IntPoly& minpoly, const std::function<Ball(mpfr_prec_t)>& target) {
  if (minpoly.degree() > store().cap)
    throw AlgebraicError(AlgebraicError::Kind::DegreeCap,
                         "minimal polynomial degree " + std::to_string(minpoly.degree()) + " exceeds cap " +
                             std::to_string(store().cap));
  auto rs = store().roots_of(minpoly);
  RootSet local = *rs;
  const std::size_t idx = identify(local, target);
  const AlgebraicId id = store().intern(minpoly, idx);
  return AlgebraicConst(id, canonical_box(id));
}

AlgebraicConst from_charpoly(const RatPoly& charpoly, const std::function<Ball(mpfr_prec_t)>& target) {
  IntPoly r = to_primitive_integer(charpoly);
  IntPoly m = minimal_factor_of(r, target);
  return from_minpoly(m, target);
}

}  // namespace

mpq_class RationalBox::max_side() const {
  mpq_class a = re_hi - re_lo, b = im_hi - im_lo;
  return a > b ? a : b;
}

std::string RationalBox::to_string() const {
  return re_lo.get_str() + "," + re_hi.get_str() + "," + im_lo.get_str() + "," + im_hi.get_str();
}

mpq_class parse_rational(const std::string& raw) {
  std::string text;
  for (char c : raw)
    if (!std::isspace(static_cast<unsigned char>(c))) text += c;
  if (text.empty()) throw std::invalid_argument("empty rational");
  auto dot = text.find('.');
  if (dot != std::string::npos) {
    std::string digits = text.substr(0, dot) + text.substr(dot + 1);
    mpz_class scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, text.size() - dot - 1);
    mpq_class q(mpz_class(digits), scale);
    q.canonicalize();
    return q;
  }
  mpq_class q(text);
  if (q.get_den() == 0) throw std::invalid_argument("zero denominator in " + raw);
  q.canonicalize();
  return q;
}

RationalBox RationalBox::parse(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) parts.push_back(item);
  if (parts.size() != 4) throw std::invalid_argument("box needs re_lo,re_hi,im_lo,im_hi: " + text);
  RationalBox box{parse_rational(parts[0]), parse_rational(parts[1]), parse_rational(parts[2]),
                  parse_rational(parts[3])};
  if (box.re_lo > box.re_hi || box.im_lo > box.im_hi) throw std::invalid_argument("empty box: " + text);
  return box;
}

const IntPoly& AlgebraicConst::min_poly() const { return store().entry(id_).poly; }

std::optional<std::string> AlgebraicConst::name() const {
  std::lock_guard lock(store().mutex);
  store().ensure_builtins();
  return store().entry(id_).name;
}

mpq_class AlgebraicConst::as_rational() const {
  const IntPoly& p = min_poly();
  if (p.degree() != 1) throw std::logic_error("algebraic constant is not rational");
  mpq_class q(-p[0], p[1]);
  q.canonicalize();
  return q;
}

void set_degree_cap(int cap) {
  if (cap < 1) throw std::invalid_argument("degree cap must be positive");
  store().cap = cap;
}

int degree_cap() { return store().cap; }

std::vector<Ball> isolate_roots(const IntPoly& f) {
  if (f.degree() < 1) throw AlgebraicError(AlgebraicError::Kind::InvalidPolynomial, "constant polynomial has no roots");
  if (f.degree() == 1) {
    mpq_class q(-f[0], f[1]);
    q.canonicalize();
    return {Ball::from_rational(q, kBasePrecision)};
  }
  const IntPoly df = f.derivative();
  for (mpfr_prec_t p = kBasePrecision; p <= kMaxPrecision; p *= 2) {
    std::vector<Ball> approx = aberth(f, p);
    std::vector<Ball> discs;
    bool ok = true;
    for (const auto& z : approx) {
      auto d = certify_near(f, df, z, 3);
      if (!d) {
        ok = false;
        break;
      }
      discs.push_back(*d);
    }
    for (std::size_t i = 0; ok && i < discs.size(); ++i)
      for (std::size_t j = i + 1; ok && j < discs.size(); ++j)
        if (discs[i].overlaps(discs[j])) ok = false;
    if (ok) return discs;
  }
  throw AlgebraicError(AlgebraicError::Kind::Isolation, "root isolation failed for " + f.to_string());
}

IntPoly minimal_factor(const IntPoly& poly, const Ball& root) {
  return minimal_factor_of(poly, [&](mpfr_prec_t) { return root; });
}

AlgebraicConst make_algebraic(const IntPoly& poly, const RationalBox& box) {
  if (poly.degree() < 1)
    throw AlgebraicError(AlgebraicError::Kind::InvalidPolynomial, "polynomial must have degree >= 1");
  IntPoly p = poly.primitive();
  if (p.degree() > store().cap)
    throw AlgebraicError(AlgebraicError::Kind::DegreeCap,
                         "degree " + std::to_string(p.degree()) + " exceeds cap " + std::to_string(store().cap));
  IntPoly sqf = squarefree_part(p);
  if (sqf.degree() != p.degree()) {
    IntPoly g = exact_quotient(p, sqf);
    throw AlgebraicError(AlgebraicError::Kind::Reducible, "polynomial has a repeated factor", {sqf, g});
  }
  auto rs = store().roots_of(p);
  RootSet local = *rs;
  std::vector<std::size_t> inside;
  for (std::size_t j = 0; j < local.discs.size(); ++j) {
    Ball& d = local.discs[j];
    bool decided = false;
    for (mpfr_prec_t prec = d.precision(); prec <= (1 << 14); prec *= 2) {
      if (prec > d.precision()) d = refine_disc(p, d, prec);
      if (d.inside_box(box.re_lo, box.re_hi, box.im_lo, box.im_hi)) {
        inside.push_back(j);
        decided = true;
        break;
      }
      if (d.outside_box(box.re_lo, box.re_hi, box.im_lo, box.im_hi)) {
        decided = true;
        break;
      }
    }
    if (!decided)
      throw AlgebraicError(AlgebraicError::Kind::NonIsolatingBox, "box boundary passes through a root");
  }
  if (inside.size() != 1)
    throw AlgebraicError(AlgebraicError::Kind::NonIsolatingBox,
                         "box contains " + std::to_string(inside.size()) + " roots of " + p.to_string());
  FactorSearch search;
  IntPoly m = search.run(p, local.discs, inside.front());
  if (m.degree() != p.degree()) {
    IntPoly other = exact_quotient(p, m);
    throw AlgebraicError(AlgebraicError::Kind::Reducible, p.to_string() + " is reducible", {m, other});
  }
  const AlgebraicId id = store().intern(p, inside.front());
  return AlgebraicConst(id, box);
}

AlgebraicConst make_rational_constant(const mpq_class& q) {
  mpq_class c = q;
  c.canonicalize();
  IntPoly p({-c.get_num(), c.get_den()});
  const AlgebraicId id = store().intern(p.primitive(), 0);
  return AlgebraicConst(id, RationalBox{c, c, 0, 0});
}

AlgebraicConst add(const AlgebraicConst& a, const AlgebraicConst& b) {
  if (a.is_rational() && b.is_rational()) return make_rational_constant(a.as_rational() + b.as_rational());
  auto target = [&](mpfr_prec_t p) { return enclosure(a.id(), p) + enclosure(b.id(), p); };
  if (a.is_rational()) return from_minpoly(shifted(b.min_poly(), a.as_rational()), target);
  if (b.is_rational()) return from_minpoly(shifted(a.min_poly(), b.as_rational()), target);
  return from_charpoly(characteristic_polynomial(kronecker_sum(companion(a.min_poly()), companion(b.min_poly()))),
                       target);
}

AlgebraicConst multiply(const AlgebraicConst& a, const AlgebraicConst& b) {
  if (a.is_rational() && b.is_rational()) return make_rational_constant(a.as_rational() * b.as_rational());
  if ((a.is_rational() && a.as_rational() == 0) || (b.is_rational() && b.as_rational() == 0))
    return make_rational_constant(0);
  auto target = [&](mpfr_prec_t p) { return enclosure(a.id(), p) * enclosure(b.id(), p); };
  if (a.is_rational()) return from_minpoly(scaled_roots(b.min_poly(), a.as_rational()), target);
  if (b.is_rational()) return from_minpoly(scaled_roots(a.min_poly(), b.as_rational()), target);
  return from_charpoly(
      characteristic_polynomial(kronecker_product(companion(a.min_poly()), companion(b.min_poly()))), target);
}

AlgebraicConst negate(const AlgebraicConst& a) {
  if (a.is_rational()) return make_rational_constant(-a.as_rational());
  return from_minpoly(a.min_poly().reflected().primitive(), [&](mpfr_prec_t p) { return -enclosure(a.id(), p); });
}

AlgebraicConst invert(const AlgebraicConst& a) {
  if (a.is_rational()) {
    if (a.as_rational() == 0) throw AlgebraicError(AlgebraicError::Kind::ZeroInverse, "inverse of zero");
    return make_rational_constant(1 / a.as_rational());
  }
  return from_minpoly(a.min_poly().reversed().primitive(),
                      [&](mpfr_prec_t p) { return inverse(enclosure(a.id(), p)); });
}

AlgebraicConst power(const AlgebraicConst& a, long exponent) {
  if (exponent == 0) return make_rational_constant(1);
  if (exponent < 0) return invert(power(a, -exponent));
  if (a.is_rational()) {
    mpq_class q = a.as_rational();
    mpz_class num, den;
    mpz_pow_ui(num.get_mpz_t(), q.get_num_mpz_t(), static_cast<unsigned long>(exponent));
    mpz_pow_ui(den.get_mpz_t(), q.get_den_mpz_t(), static_cast<unsigned long>(exponent));
    return make_rational_constant(mpq_class(num, den));
  }
  if (exponent == 1) return a;
  auto target = [&](mpfr_prec_t p) { return pow(enclosure(a.id(), p), exponent); };
  return from_charpoly(
      characteristic_polynomial(matrix_power(companion(a.min_poly()), static_cast<unsigned long>(exponent))),
      target);
}

AlgebraicConst field_op(FieldOp op, const AlgebraicConst& a, const AlgebraicConst& b) {
  switch (op) {
    case FieldOp::Add:
      return add(a, b);
    case FieldOp::Mul:
      return multiply(a, b);
    case FieldOp::Neg:
      return negate(a);
    case FieldOp::Inv:
      return invert(a);
  }
  throw std::logic_error("unknown field operation");
}

Ball enclosure(AlgebraicId id, mpfr_prec_t prec) {
  std::lock_guard lock(store().mutex);
  Entry& e = store().entry(id);
  if (e.poly.degree() == 1) {
    mpq_class q(-e.poly[0], e.poly[1]);
    q.canonicalize();
    return Ball::from_rational(q, prec);
  }
  Float limit = radius_for(e.best, static_cast<long>(prec));
  if (mpfr_cmp(e.best.radius().get(), limit.get()) > 0) {
    mpfr_prec_t p = std::max(e.best.precision(), prec + 32);
    for (int attempt = 0; attempt < 8; ++attempt, p *= 2) {
      e.best = refine_disc(e.poly, e.best, p);
      limit = radius_for(e.best, static_cast<long>(prec));
      if (mpfr_cmp(e.best.radius().get(), limit.get()) <= 0) break;
    }
  }
  return e.best.precision() > prec + 64 ? e.best.with_precision(prec + 64) : e.best;
}

RationalBox refine_box(const AlgebraicConst& a, const mpq_class& target_radius) {
  if (target_radius <= 0) throw std::invalid_argument("target radius must be positive");
  std::lock_guard lock(store().mutex);
  Entry& e = store().entry(a.id());
  if (e.poly.degree() == 1) {
    mpq_class q = a.as_rational();
    return RationalBox{q, q, 0, 0};
  }
  mpq_class half = target_radius / 4;
  for (mpfr_prec_t p = e.best.precision(); !radius_below(e.best, half); p *= 2) {
    if (p > (1 << 20)) throw AlgebraicError(AlgebraicError::Kind::Isolation, "refinement did not converge");
    e.best = refine_disc(e.poly, e.best, p * 2);
  }
  RationalBox r = exact_box(e.best);
  const RationalBox& user = a.box();
  r.re_lo = std::max(r.re_lo, user.re_lo);
  r.re_hi = std::min(r.re_hi, user.re_hi);
  r.im_lo = std::max(r.im_lo, user.im_lo);
  r.im_hi = std::min(r.im_hi, user.im_hi);
  return r;
}

AlgebraicConst constant(AlgebraicId id) { return AlgebraicConst(id, canonical_box(id)); }

int compare(AlgebraicId a, AlgebraicId b) {
  if (a == b) return 0;
  const Entry& ea = store().entry(a);
  const Entry& eb = store().entry(b);
  if (ea.poly.degree() != eb.poly.degree()) return ea.poly.degree() < eb.poly.degree() ? -1 : 1;
  for (int i = ea.poly.degree(); i >= 0; --i) {
    const int c = cmp(ea.poly[static_cast<std::size_t>(i)], eb.poly[static_cast<std::size_t>(i)]);
    if (c != 0) return c < 0 ? -1 : 1;
  }
  if (ea.index != eb.index) return ea.index < eb.index ? -1 : 1;
  return 0;
}

RationalBox canonical_box(AlgebraicId id) { return store().entry(id).canonical; }

std::size_t root_index(AlgebraicId id) { return store().entry(id).index; }

void register_name(const std::string& name, const AlgebraicConst& value) {
  std::lock_guard lock(store().mutex);
  store().ensure_builtins();
  store().name(name, value.id(), false);
}

std::optional<AlgebraicConst> lookup_name(const std::string& name) {
  auto id = store().find_name(name);
  if (!id) return std::nullopt;
  return constant(*id);
}

std::vector<std::pair<std::string, AlgebraicConst>> user_registry() {
  std::vector<std::pair<std::string, AlgebraicConst>> out;
  for (const auto& n : store().user_names()) out.emplace_back(n, *lookup_name(n));
  return out;
}

void load_registry_text(const std::string& text) {
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::vector<std::string> fields;
    std::stringstream ls(line);
    std::string field;
    while (std::getline(ls, field, ':')) fields.push_back(field);
    if (fields.size() != 3)
      throw std::invalid_argument("registry line " + std::to_string(lineno) + ": expected name : coeffs : box");
    std::string name;
    for (char c : fields[0])
      if (!std::isspace(static_cast<unsigned char>(c))) name += c;
    std::vector<mpz_class> coeffs;
    std::stringstream cs(fields[1]);
    std::string c;
    while (std::getline(cs, c, ',')) {
      mpq_class q = parse_rational(c);
      if (q.get_den() != 1) throw std::invalid_argument("registry line " + std::to_string(lineno) + ": integer coefficients required");
      coeffs.push_back(q.get_num());
    }
    register_name(name, make_algebraic(IntPoly(coeffs), RationalBox::parse(fields[2])));
  }
}

void load_registry(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open registry file " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  load_registry_text(buffer.str());
}

}  // namespace schanuel
