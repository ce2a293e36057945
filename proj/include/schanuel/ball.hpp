#pragma once

#include <mpfr.h>

#include <gmpxx.h>

#include <stdexcept>
#include <string>

namespace schanuel {

/// RAII owner of an mpfr_t. Copies keep the source precision.
class Float {
 public:
  explicit Float(mpfr_prec_t prec = 64);
  Float(const Float& other);
  Float(Float&& other) noexcept;
  Float& operator=(const Float& other);
  Float& operator=(Float&& other) noexcept;
  ~Float();

  mpfr_ptr get() { return value_; }
  mpfr_srcptr get() const { return value_; }
  mpfr_prec_t precision() const { return mpfr_get_prec(value_); }

  double to_double() const { return mpfr_get_d(value_, MPFR_RNDN); }
  bool is_zero() const { return mpfr_zero_p(value_) != 0; }
  int sign() const { return mpfr_sgn(value_); }

 private:
  mpfr_t value_;
};

/// Numeric failure inside ball arithmetic (division by a ball containing
/// zero, exponent overflow). Callers typically retry at higher precision.
class BallError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Complex midpoint-radius enclosure. The midpoint carries `precision` bits;
/// the radius is an upper bound kept at a small fixed precision and always
/// rounded upward.
class Ball {
 public:
  static constexpr mpfr_prec_t kRadiusPrecision = 64;

  explicit Ball(mpfr_prec_t prec);

  static Ball exact_integer(const mpz_class& value, mpfr_prec_t prec);
  static Ball from_rational(const mpq_class& value, mpfr_prec_t prec);
  static Ball from_parts(const Float& re, const Float& im, const Float& radius,
                         mpfr_prec_t prec);
  static Ball pi(mpfr_prec_t prec);
  static Ball imaginary_unit(mpfr_prec_t prec);

  mpfr_prec_t precision() const { return prec_; }
  const Float& re() const { return re_; }
  const Float& im() const { return im_; }
  const Float& radius() const { return rad_; }

  /// Set when a logarithm was taken of an enclosure straddling the negative
  /// real axis; the imaginary part was widened to cover both sides.
  bool near_branch_cut() const { return near_cut_; }
  void mark_near_branch_cut() { near_cut_ = true; }

  bool contains_zero() const;
  /// |mid| + rad, rounded up.
  Float abs_upper() const;
  /// max(|mid| - rad, 0), rounded down.
  Float abs_lower() const;
  /// True when the two discs intersect (midpoint distance <= rad sum).
  bool overlaps(const Ball& other) const;
  /// True when `other` lies inside this disc.
  bool contains(const Ball& other) const;
  /// True when the disc is contained in the real rectangle, strictly.
  bool inside_box(const mpq_class& re_lo, const mpq_class& re_hi, const mpq_class& im_lo,
                  const mpq_class& im_hi) const;
  /// True when the disc's bounding square misses the rectangle.
  bool outside_box(const mpq_class& re_lo, const mpq_class& re_hi, const mpq_class& im_lo,
                   const mpq_class& im_hi) const;

  void add_error(const Float& err);
  Ball with_precision(mpfr_prec_t prec) const;

  std::string to_string(int digits = 20) const;

  friend Ball operator+(const Ball& a, const Ball& b);
  friend Ball operator-(const Ball& a, const Ball& b);
  friend Ball operator-(const Ball& a);
  friend Ball operator*(const Ball& a, const Ball& b);
  friend Ball operator/(const Ball& a, const Ball& b);
  friend Ball inverse(const Ball& a);
  friend Ball exp(const Ball& a);
  friend Ball log(const Ball& a, long branch);
  friend Ball pow(const Ball& a, long exponent);

 private:
  mpfr_prec_t prec_;
  Float re_;
  Float im_;
  Float rad_;
  bool near_cut_ = false;
};

Ball operator+(const Ball& a, const Ball& b);
Ball operator-(const Ball& a, const Ball& b);
Ball operator-(const Ball& a);
Ball operator*(const Ball& a, const Ball& b);
Ball operator/(const Ball& a, const Ball& b);
Ball inverse(const Ball& a);
Ball exp(const Ball& a);
/// Principal logarithm plus 2*pi*i*branch.
Ball log(const Ball& a, long branch);
Ball pow(const Ball& a, long exponent);
Ball scale(const Ball& a, const mpz_class& factor);

/// Widen the MPFR exponent range once per process.
void init_float_range();

}  // namespace schanuel
