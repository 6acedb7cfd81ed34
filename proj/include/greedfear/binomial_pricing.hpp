#pragma once

#include <Eigen/Core>

#include <functional>
#include <vector>

namespace greedfear {

/// Recombining tree with additive factors 1 + μΔt ± σ√Δt and greed–fear coefficient 𝒜.
struct GreedFearBinomialSpec {
    double S0;
    double mu;
    double sigma;
    double r;  ///< in (0, μ)
    double A;
    int n_steps;
    double maturity;

    double dt() const { return maturity / n_steps; }
    double up() const;
    double down() const;
    /// D_y = (μ - r)𝒜
    double implied_dividend_yield() const { return (mu - r) * A; }
    /// θ = (μ + D_y - r)/σ
    double theta() const;
};

struct TreeNode {
    int step;
    int up_count;
    double price;
};

/// Prices level by level; level k holds k+1 nodes indexed by up count.
class BinomialLattice {
public:
    explicit BinomialLattice(std::vector<Eigen::ArrayXd> levels) : levels_(std::move(levels)) {}

    int n_steps() const { return static_cast<int>(levels_.size()) - 1; }
    const Eigen::ArrayXd& level(int k) const { return levels_.at(static_cast<std::size_t>(k)); }
    TreeNode node(int k, int j) const { return {k, j, level(k)(j)}; }

private:
    std::vector<Eigen::ArrayXd> levels_;
};

struct BranchWeights {
    double up;    ///< ½ - ½θ√Δt
    double down;  ///< ½ + ½θ√Δt
};

/// Smallest step count for which both the down factor and the weights are valid.
int minimal_steps(const GreedFearBinomialSpec& spec);

/// Throws DomainError on bad fields and ConfigurationError, naming minimal_steps, when the step is too coarse.
void validate(const GreedFearBinomialSpec& spec);

/// Builds every level. σ = 0 is allowed here and gives a single path.
BinomialLattice build_tree(const GreedFearBinomialSpec& spec);

BranchWeights branch_weights(const GreedFearBinomialSpec& spec);

/// 𝒢 at a node: 𝒜σ(C_up - C_dn)√Δt.
double node_greed_fear(double A, double sigma, double C_up, double C_dn, double dt);

/// (C_up - C_dn)/(S_up - S_dn) + 𝒢(S_up + S_dn)/(S_up - S_dn)²; throws ConfigurationError when S_up = S_dn.
double hedge_ratio_node(double C_up, double C_dn, double S_up, double S_dn, double G_node);

/// Backward induction C_k = e^{-rΔt}[w_up C_up + w_dn C_dn] from g at maturity.
double price_binomial(const GreedFearBinomialSpec& spec, const std::function<double(double)>& payoff);

/// e^{-D_y τ} S Φ(D¹) - K e^{-rτ} Φ(D²), D¹ = [ln(S/K) + (r - D_y + σ²/2)τ]/(σ√τ).
double price_closed_form_dividend(double S, double K, double t, double T, double r, double sigma, double D_y);

/// Put counterpart of price_closed_form_dividend.
double price_put_closed_form_dividend(double S, double K, double t, double T, double r, double sigma, double D_y);

}  // namespace greedfear
