#pragma once

#include <array>
#include <vector>

namespace lightjump {

/// Parameters of the symmetric jump measure nu(dy) = exp(-lambda |y|^alpha) dy
/// on one axis. Construction rejects lambda <= 0 and alpha <= 1.
class JumpSpec {
 public:
  JumpSpec(double lambda, double alpha);

  [[nodiscard]] double lambda() const noexcept { return lambda_; }
  [[nodiscard]] double alpha() const noexcept { return alpha_; }

  friend bool operator==(const JumpSpec&, const JumpSpec&) = default;

 private:
  double lambda_;
  double alpha_;
};

/// The exponential moments of the jump measure at one momentum value,
/// all computed from a single pass of the quadrature engine.
struct MomentSet {
  double m0 = 0.0;         ///< integral of exp(y p) nu(dy)
  double m1 = 0.0;         ///< integral of y exp(y p) nu(dy)
  double m2 = 0.0;         ///< integral of y^2 exp(y p) nu(dy)
  double increment = 0.0;  ///< integral of (exp(y p) - 1) nu(dy), free of cancellation
};

/// Largest value of y p - lambda |y|^alpha over y; moments throw
/// QuadratureOverflow once this exceeds kMaxLogPeak.
double peak_exponent(const JumpSpec& spec, double p);

inline constexpr double kMaxLogPeak = 700.0;
inline constexpr double kMomentRelTol = 1e-11;

MomentSet moments(const JumpSpec& spec, double p);

/// Total mass of the measure.
double mass(const JumpSpec& spec);

/// M_k(p) for k in {0, 1, 2}.
double moment(const JumpSpec& spec, double p, int k);

/// g(p) = M_0(p) - mass.
double exp_increment(const JumpSpec& spec, double p);

/// Piecewise Chebyshev interpolant of the moments of one spec over the whole
/// admissible momentum range |p| <= p_max (peak exponent up to kMaxLogPeak, and
/// every moment finite in double precision),
/// built from `moments` at construction. It tabulates log(g/p^2), log(M1/p)
/// and log(M2), which are smooth and even, so relative accuracy carries over
/// to small p. Evaluation costs a few hundred nanoseconds instead of a full
/// adaptive quadrature.
class MomentTable {
 public:
  explicit MomentTable(const JumpSpec& spec);

  /// Throws QuadratureOverflow for |p| > p_max and InvalidArgument for non-finite p.
  [[nodiscard]] MomentSet operator()(double p) const;

  [[nodiscard]] double p_max() const noexcept { return p_max_; }
  [[nodiscard]] double mass() const noexcept { return mass_; }
  [[nodiscard]] int panels() const noexcept { return static_cast<int>(panels_.size()); }

  static constexpr int kNodes = 24;

 private:
  struct Panel {
    double a = 0.0;
    double b = 0.0;
    std::array<std::array<double, kNodes>, 3> coef{};
  };

  std::vector<Panel> panels_;
  std::vector<double> upper_;   // panel right ends, for lookup
  double mass_ = 0.0;
  double p_max_ = 0.0;
};

}  // namespace lightjump
