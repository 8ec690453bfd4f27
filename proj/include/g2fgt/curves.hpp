#pragma once

#include <utility>
#include <vector>

namespace g2fgt {

// Discount factors on year-fraction pillars, log-linear between pillars and
// flat in the instantaneous forward beyond the last one. A (0, 1) pillar is
// inserted when absent.
class DiscountCurve {
public:
    DiscountCurve() = default;
    explicit DiscountCurve(std::vector<std::pair<double, double>> pillars);

    static DiscountCurve flat(double continuous_rate, double horizon);

    double discount(double t) const;
    double instantaneous_forward(double t) const;
    double horizon() const { return times_.empty() ? 0.0 : times_.back(); }
    std::vector<std::pair<double, double>> pillars() const;

private:
    std::vector<double> times_;
    std::vector<double> log_df_;
};

// Discounting curve plus the curve the floating reference rate is projected from.
struct CurveSet {
    DiscountCurve discount;
    DiscountCurve forecast;

    double horizon() const;
    // Throws std::out_of_range when t lies outside [0, horizon()].
    void check_horizon(double t, const char* what) const;
};

// exp(-int_{ts}^{te} (psi - psi^L)) with both curves fitted under the same
// model variance; reduces to a ratio of the two curves' discount factors.
double spread_factor(const CurveSet& curves, double ts, double te);

}  // namespace g2fgt
