#pragma once

namespace dcvar {

/// Standard normal density.
double std_normal_pdf(double x) noexcept;

/// Standard normal CDF via erfc; absolute error below 1e-15, saturates to 0/1.
double std_normal_cdf(double x) noexcept;

/// Inverse of std_normal_cdf on (0, 1). Throws DomainError outside.
double std_normal_quantile(double p);

/// E[exp(a Y) 1{Y <= d}] for Y ~ Normal(mean, sd^2).
double truncated_lognormal_moment(double a, double d, double mean, double sd);

/// Law of the terminal state-price density Z through the partial moments
/// H_p(y) = E[Z^p 1{Z <= y}], p in {0, 1}.
///
/// The multiplier solver only touches Z through this interface.
class StatePriceDistribution {
public:
    virtual ~StatePriceDistribution() = default;

    [[nodiscard]] virtual double h0(double y) const = 0;
    [[nodiscard]] virtual double h1(double y) const = 0;
    /// Inverse of h1 on the open interval (0, E[Z]); DomainError outside.
    [[nodiscard]] virtual double h1_inverse(double q) const = 0;
    [[nodiscard]] virtual double expected_z() const = 0;
    /// True when Z is a point mass (no market price of risk).
    [[nodiscard]] virtual bool degenerate() const { return false; }

    [[nodiscard]] double h(int p, double y) const { return p == 0 ? h0(y) : h1(y); }
};

/// H1^{-1} extended by the boundary conventions: q <= 0 maps to 0 and
/// q >= E[Z] maps to +inf.
double h1_inverse_saturating(const StatePriceDistribution& dist, double q);

/// ln Z ~ Normal(m0, nu0^2) with E[Z] = exp(m0 + nu0^2/2).
///
/// nu0 == 0 is accepted and describes the point mass Z = exp(m0); h1_inverse
/// is then undefined and throws.
class LognormalStatePrice final : public StatePriceDistribution {
public:
    LognormalStatePrice(double m0, double nu0);

    [[nodiscard]] double h0(double y) const override;
    [[nodiscard]] double h1(double y) const override;
    [[nodiscard]] double h1_inverse(double q) const override;
    [[nodiscard]] double expected_z() const override { return expected_z_; }
    [[nodiscard]] bool degenerate() const override { return nu0_ == 0.0; }

    [[nodiscard]] double m0() const noexcept { return m0_; }
    [[nodiscard]] double nu0() const noexcept { return nu0_; }

    /// Standardized log-level (ln y - m0)/nu0, the F1 of the closed forms.
    [[nodiscard]] double standardized(double y) const;

private:
    double m0_;
    double nu0_;
    double expected_z_;
};

}  // namespace dcvar
