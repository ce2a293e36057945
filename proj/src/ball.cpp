#include "schanuel/ball.hpp"

#include <algorithm>
#include <cstdio>
#include <memory>

namespace schanuel {

namespace {

constexpr mpfr_prec_t kMag = Ball::kRadiusPrecision;

void ensure_range() {
  static const bool done = [] {
    init_float_range();
    return true;
  }();
  (void)done;
}

Float mag_zero() { return Float(kMag); }

// 0.5 ulp of x at its own precision, as an upper bound for one RNDN rounding.
Float half_ulp(const Float& x) {
  Float out(kMag);
  if (x.is_zero()) return out;
  mpfr_set_ui_2exp(out.get(), 1, mpfr_get_exp(x.get()) - x.precision() - 1, MPFR_RNDU);
  return out;
}

Float mag_add(const Float& a, const Float& b) {
  Float out(kMag);
  mpfr_add(out.get(), a.get(), b.get(), MPFR_RNDU);
  return out;
}

Float mag_mul(const Float& a, const Float& b) {
  Float out(kMag);
  mpfr_mul(out.get(), a.get(), b.get(), MPFR_RNDU);
  return out;
}

Float mag_abs(const Float& x) {
  Float out(kMag);
  mpfr_abs(out.get(), x.get(), MPFR_RNDU);
  return out;
}

Float hypot_up(const Float& re, const Float& im) {
  Float out(kMag);
  mpfr_hypot(out.get(), re.get(), im.get(), MPFR_RNDU);
  return out;
}

Float hypot_down(const Float& re, const Float& im) {
  Float out(kMag);
  mpfr_hypot(out.get(), re.get(), im.get(), MPFR_RNDD);
  return out;
}

// factor * 2^-prec * (|re| + |im|), rounded up.
Float relative_error(const Float& re, const Float& im, mpfr_prec_t prec, long factor) {
  Float out = mag_add(mag_abs(re), mag_abs(im));
  mpfr_mul_si(out.get(), out.get(), factor, MPFR_RNDU);
  mpfr_mul_2si(out.get(), out.get(), -static_cast<long>(prec), MPFR_RNDU);
  return out;
}

std::string format_float(const Float& x, int digits) {
  char* buffer = nullptr;
  mpfr_asprintf(&buffer, "%.*Rg", digits, x.get());
  std::string out = buffer ? buffer : "";
  mpfr_free_str(buffer);
  return out;
}

}  // namespace

void init_float_range() {
  mpfr_set_emax(mpfr_get_emax_max());
  mpfr_set_emin(mpfr_get_emin_min());
}

Float::Float(mpfr_prec_t prec) {
  mpfr_init2(value_, prec);
  mpfr_set_zero(value_, 1);
}

Float::Float(const Float& other) {
  mpfr_init2(value_, other.precision());
  mpfr_set(value_, other.value_, MPFR_RNDN);
}

Float::Float(Float&& other) noexcept {
  mpfr_init2(value_, MPFR_PREC_MIN);
  mpfr_swap(value_, other.value_);
}

Float& Float::operator=(const Float& other) {
  if (this != &other) {
    mpfr_set_prec(value_, other.precision());
    mpfr_set(value_, other.value_, MPFR_RNDN);
  }
  return *this;
}

Float& Float::operator=(Float&& other) noexcept {
  mpfr_swap(value_, other.value_);
  return *this;
}

Float::~Float() { mpfr_clear(value_); }

Ball::Ball(mpfr_prec_t prec) : prec_(prec), re_(prec), im_(prec), rad_(kMag) { ensure_range(); }

Ball Ball::exact_integer(const mpz_class& value, mpfr_prec_t prec) {
  Ball out(prec);
  if (mpfr_set_z(out.re_.get(), value.get_mpz_t(), MPFR_RNDN) != 0)
    out.rad_ = half_ulp(out.re_);
  return out;
}

Ball Ball::from_rational(const mpq_class& value, mpfr_prec_t prec) {
  Ball out(prec);
  if (mpfr_set_q(out.re_.get(), value.get_mpq_t(), MPFR_RNDN) != 0)
    out.rad_ = half_ulp(out.re_);
  return out;
}

Ball Ball::from_parts(const Float& re, const Float& im, const Float& radius, mpfr_prec_t prec) {
  Ball out(prec);
  Float err = mag_zero();
  if (mpfr_set(out.re_.get(), re.get(), MPFR_RNDN) != 0) err = mag_add(err, half_ulp(out.re_));
  if (mpfr_set(out.im_.get(), im.get(), MPFR_RNDN) != 0) err = mag_add(err, half_ulp(out.im_));
  Float r(kMag);
  mpfr_set(r.get(), radius.get(), MPFR_RNDU);
  out.rad_ = mag_add(r, err);
  return out;
}

Ball Ball::pi(mpfr_prec_t prec) {
  Ball out(prec);
  mpfr_const_pi(out.re_.get(), MPFR_RNDN);
  out.rad_ = half_ulp(out.re_);
  return out;
}

Ball Ball::imaginary_unit(mpfr_prec_t prec) {
  Ball out(prec);
  mpfr_set_ui(out.im_.get(), 1, MPFR_RNDN);
  return out;
}

bool Ball::contains_zero() const { return mpfr_cmp(hypot_down(re_, im_).get(), rad_.get()) <= 0; }

Float Ball::abs_upper() const { return mag_add(hypot_up(re_, im_), rad_); }

Float Ball::abs_lower() const {
  Float out = hypot_down(re_, im_);
  mpfr_sub(out.get(), out.get(), rad_.get(), MPFR_RNDD);
  if (mpfr_sgn(out.get()) < 0) mpfr_set_zero(out.get(), 1);
  return out;
}

bool Ball::overlaps(const Ball& other) const {
  const mpfr_prec_t p = std::max(prec_, other.prec_) + 2;
  Float dx(p), dy(p);
  mpfr_sub(dx.get(), re_.get(), other.re_.get(), MPFR_RNDZ);
  mpfr_sub(dy.get(), im_.get(), other.im_.get(), MPFR_RNDZ);
  Float dist = hypot_down(dx, dy);
  return mpfr_cmp(dist.get(), mag_add(rad_, other.rad_).get()) <= 0;
}

bool Ball::contains(const Ball& other) const {
  const mpfr_prec_t p = std::max(prec_, other.prec_) + 2;
  Float dx(p), dy(p);
  mpfr_sub(dx.get(), re_.get(), other.re_.get(), MPFR_RNDA);
  mpfr_sub(dy.get(), im_.get(), other.im_.get(), MPFR_RNDA);
  Float reach = mag_add(hypot_up(dx, dy), other.rad_);
  return mpfr_cmp(reach.get(), rad_.get()) <= 0;
}

bool Ball::inside_box(const mpq_class& re_lo, const mpq_class& re_hi, const mpq_class& im_lo,
                      const mpq_class& im_hi) const {
  const mpfr_prec_t p = prec_ + kMag + 2;
  Float lo(p), hi(p);
  mpfr_sub(lo.get(), re_.get(), rad_.get(), MPFR_RNDD);
  mpfr_add(hi.get(), re_.get(), rad_.get(), MPFR_RNDU);
  if (mpfr_cmp_q(lo.get(), re_lo.get_mpq_t()) <= 0 || mpfr_cmp_q(hi.get(), re_hi.get_mpq_t()) >= 0)
    return false;
  mpfr_sub(lo.get(), im_.get(), rad_.get(), MPFR_RNDD);
  mpfr_add(hi.get(), im_.get(), rad_.get(), MPFR_RNDU);
  return mpfr_cmp_q(lo.get(), im_lo.get_mpq_t()) > 0 && mpfr_cmp_q(hi.get(), im_hi.get_mpq_t()) < 0;
}

bool Ball::outside_box(const mpq_class& re_lo, const mpq_class& re_hi, const mpq_class& im_lo,
                       const mpq_class& im_hi) const {
  const mpfr_prec_t p = prec_ + kMag + 2;
  Float lo(p), hi(p);
  mpfr_sub(lo.get(), re_.get(), rad_.get(), MPFR_RNDD);
  mpfr_add(hi.get(), re_.get(), rad_.get(), MPFR_RNDU);
  if (mpfr_cmp_q(hi.get(), re_lo.get_mpq_t()) < 0 || mpfr_cmp_q(lo.get(), re_hi.get_mpq_t()) > 0)
    return true;
  mpfr_sub(lo.get(), im_.get(), rad_.get(), MPFR_RNDD);
  mpfr_add(hi.get(), im_.get(), rad_.get(), MPFR_RNDU);
  return mpfr_cmp_q(hi.get(), im_lo.get_mpq_t()) < 0 || mpfr_cmp_q(lo.get(), im_hi.get_mpq_t()) > 0;
}

void Ball::add_error(const Float& err) { rad_ = mag_add(rad_, mag_abs(err)); }

Ball Ball::with_precision(mpfr_prec_t prec) const {
  Ball out = from_parts(re_, im_, rad_, prec);
  out.near_cut_ = near_cut_;
  return out;
}

std::string Ball::to_string(int digits) const {
  std::string out = "[" + format_float(re_, digits);
  if (!im_.is_zero()) out += (im_.sign() < 0 ? " - " : " + ") + format_float(mag_abs(im_), digits) + "i";
  char* buffer = nullptr;
  mpfr_asprintf(&buffer, " +/- %.3Re]", rad_.get());
  out += buffer;
  mpfr_free_str(buffer);
  return out;
}

Ball operator+(const Ball& a, const Ball& b) {
  const mpfr_prec_t p = std::max(a.prec_, b.prec_);
  Ball out(p);
  Float err = mag_add(a.rad_, b.rad_);
  if (mpfr_add(out.re_.get(), a.re_.get(), b.re_.get(), MPFR_RNDN) != 0)
    err = mag_add(err, half_ulp(out.re_));
  if (mpfr_add(out.im_.get(), a.im_.get(), b.im_.get(), MPFR_RNDN) != 0)
    err = mag_add(err, half_ulp(out.im_));
  out.rad_ = err;
  out.near_cut_ = a.near_cut_ || b.near_cut_;
  return out;
}

Ball operator-(const Ball& a) {
  Ball out(a.prec_);
  mpfr_neg(out.re_.get(), a.re_.get(), MPFR_RNDN);
  mpfr_neg(out.im_.get(), a.im_.get(), MPFR_RNDN);
  out.rad_ = a.rad_;
  out.near_cut_ = a.near_cut_;
  return out;
}

Ball operator-(const Ball& a, const Ball& b) { return a + (-b); }

Ball operator*(const Ball& a, const Ball& b) {
  const mpfr_prec_t p = std::max(a.prec_, b.prec_);
  Ball out(p);
  Float err = mag_zero();
  if (mpfr_fmms(out.re_.get(), a.re_.get(), b.re_.get(), a.im_.get(), b.im_.get(), MPFR_RNDN) != 0)
    err = mag_add(err, half_ulp(out.re_));
  if (mpfr_fmma(out.im_.get(), a.re_.get(), b.im_.get(), a.im_.get(), b.re_.get(), MPFR_RNDN) != 0)
    err = mag_add(err, half_ulp(out.im_));
  Float prop = mag_add(mag_mul(hypot_up(a.re_, a.im_), b.rad_), mag_mul(hypot_up(b.re_, b.im_), a.rad_));
  prop = mag_add(prop, mag_mul(a.rad_, b.rad_));
  out.rad_ = mag_add(prop, err);
  out.near_cut_ = a.near_cut_ || b.near_cut_;
  return out;
}

Ball inverse(const Ball& a) {
  if (a.contains_zero()) throw BallError("inverse of an enclosure containing zero");
  const mpfr_prec_t p = a.prec_;
  Ball out(p);
  Float d(p + 16);
  bool inexact = mpfr_fmma(d.get(), a.re_.get(), a.re_.get(), a.im_.get(), a.im_.get(), MPFR_RNDN) != 0;
  inexact |= mpfr_div(out.re_.get(), a.re_.get(), d.get(), MPFR_RNDN) != 0;
  inexact |= mpfr_div(out.im_.get(), a.im_.get(), d.get(), MPFR_RNDN) != 0;
  mpfr_neg(out.im_.get(), out.im_.get(), MPFR_RNDN);
  Float err = inexact ? relative_error(out.re_, out.im_, p, 4) : mag_zero();
  if (!a.rad_.is_zero()) {
    Float h = hypot_down(a.re_, a.im_);
    Float gap(kMag);
    mpfr_sub(gap.get(), h.get(), a.rad_.get(), MPFR_RNDD);
    Float denom(kMag);
    mpfr_mul(denom.get(), h.get(), gap.get(), MPFR_RNDD);
    Float prop(kMag);
    mpfr_div(prop.get(), a.rad_.get(), denom.get(), MPFR_RNDU);
    err = mag_add(err, prop);
  }
  out.rad_ = err;
  out.near_cut_ = a.near_cut_;
  return out;
}

Ball operator/(const Ball& a, const Ball& b) { return a * inverse(b); }

Ball exp(const Ball& a) {
  const mpfr_prec_t p = a.prec_;
  if (mpfr_cmpabs_ui(a.re_.get(), 1UL << 60) > 0) throw BallError("exponential overflow");
  Ball out(p);
  const mpfr_prec_t wp = p + 16;
  Float e(wp), c(wp), s(wp);
  bool inexact = mpfr_exp(e.get(), a.re_.get(), MPFR_RNDN) != 0;
  inexact |= mpfr_sin_cos(s.get(), c.get(), a.im_.get(), MPFR_RNDN) != 0;
  inexact |= mpfr_mul(out.re_.get(), e.get(), c.get(), MPFR_RNDN) != 0;
  inexact |= mpfr_mul(out.im_.get(), e.get(), s.get(), MPFR_RNDN) != 0;
  Float e_up(kMag);
  mpfr_exp(e_up.get(), a.re_.get(), MPFR_RNDU);
  Float err = mag_zero();
  if (inexact) {
    err = e_up;
    mpfr_mul_2si(err.get(), err.get(), 3 - static_cast<long>(p), MPFR_RNDU);
  }
  if (!a.rad_.is_zero()) {
    Float grow(kMag);
    mpfr_expm1(grow.get(), a.rad_.get(), MPFR_RNDU);
    // |exp(mid)| * (exp(r) - 1), using e_up inflated for the rounding of e itself.
    Float bound = mag_mul(e_up, grow);
    err = mag_add(err, bound);
  }
  out.rad_ = err;
  out.near_cut_ = a.near_cut_;
  return out;
}

Ball log(const Ball& a, long branch) {
  if (a.contains_zero()) throw BallError("logarithm of an enclosure containing zero");
  const mpfr_prec_t p = a.prec_;
  Ball out(p);
  Float err = mag_zero();

  Float h(p + 16);
  bool h_inexact = mpfr_hypot(h.get(), a.re_.get(), a.im_.get(), MPFR_RNDN) != 0;
  if (mpfr_log(out.re_.get(), h.get(), MPFR_RNDN) != 0) err = mag_add(err, half_ulp(out.re_));
  if (h_inexact) {
    Float rel(kMag);
    mpfr_set_ui_2exp(rel.get(), 1, -static_cast<long>(p) - 14, MPFR_RNDU);
    err = mag_add(err, rel);
  }

  Float im_pos(p);
  mpfr_set(im_pos.get(), a.im_.get(), MPFR_RNDN);
  if (mpfr_zero_p(im_pos.get())) mpfr_set_zero(im_pos.get(), 1);
  const bool crosses_cut = a.re_.sign() < 0 && !a.rad_.is_zero() &&
                           mpfr_cmpabs(a.im_.get(), a.rad_.get()) <= 0;
  if (crosses_cut) {
    mpfr_set_zero(out.im_.get(), 1);
    Float four(kMag);
    mpfr_set_ui(four.get(), 4, MPFR_RNDU);
    err = mag_add(err, four);
    out.near_cut_ = true;
  } else if (mpfr_atan2(out.im_.get(), im_pos.get(), a.re_.get(), MPFR_RNDN) != 0) {
    err = mag_add(err, half_ulp(out.im_));
  }

  if (!a.rad_.is_zero()) {
    Float hl = hypot_down(a.re_, a.im_);
    Float gap(kMag);
    mpfr_sub(gap.get(), hl.get(), a.rad_.get(), MPFR_RNDD);
    Float prop(kMag);
    mpfr_div(prop.get(), a.rad_.get(), gap.get(), MPFR_RNDU);
    err = mag_add(err, prop);
  }
  out.rad_ = err;
  if (a.near_cut_) out.near_cut_ = true;

  if (branch != 0) {
    Ball offset = Ball::pi(p + 16);
    offset = scale(offset, mpz_class(2) * branch);
    Ball shift(p + 16);
    mpfr_set(shift.im_.get(), offset.re_.get(), MPFR_RNDN);
    shift.rad_ = offset.rad_;
    Ball sum = out + shift;
    sum = sum.with_precision(p);
    if (out.near_cut_) sum.near_cut_ = true;
    return sum;
  }
  return out;
}

Ball pow(const Ball& a, long exponent) {
  if (exponent == 0) return Ball::exact_integer(1, a.prec_);
  if (exponent < 0) return inverse(pow(a, -exponent));
  Ball result = Ball::exact_integer(1, a.prec_);
  Ball base = a;
  unsigned long e = static_cast<unsigned long>(exponent);
  while (e != 0) {
    if (e & 1UL) result = result * base;
    e >>= 1;
    if (e != 0) base = base * base;
  }
  return result;
}

Ball scale(const Ball& a, const mpz_class& factor) {
  return Ball::exact_integer(factor, a.precision()) * a;
}

}  // namespace schanuel
