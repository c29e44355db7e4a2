#include "riskagg/mixtures.hpp"

#include <stdexcept>

#include "riskagg/composites.hpp"

namespace riskagg {
namespace {

void require_dimension(std::size_t n, const MarginVector& F) {
  if (n != F.size()) throw std::invalid_argument("mixture: matrix and margin dimensions differ");
}

std::vector<WeightedComponent> row_components(std::span<const double> row, const MarginVector& F) {
  std::vector<WeightedComponent> parts;
  for (std::size_t j = 0; j < row.size(); ++j) parts.push_back({row[j], F[j]});
  return parts;
}

}  // namespace

MarginVector distribution_mixture(const DoublyStochasticMatrix& L, const MarginVector& F) {
  require_dimension(L.size(), F);
  std::vector<Distribution> out;
  for (std::size_t i = 0; i < L.size(); ++i) out.push_back(make_mixture(row_components(L.row(i), F)));
  return MarginVector(std::move(out));
}

MarginVector quantile_mixture(const DoublyStochasticMatrix& L, const MarginVector& F) {
  require_dimension(L.size(), F);
  std::vector<Distribution> out;
  for (std::size_t i = 0; i < L.size(); ++i) {
    out.push_back(make_quantile_sum(row_components(L.row(i), F)));
  }
  return MarginVector(std::move(out));
}

MarginVector quantile_mixture(const SquareMatrix& L, const MarginVector& F) {
  require_dimension(L.size(), F);
  std::vector<double> theta;
  double alpha = 0.0;
  for (std::size_t j = 0; j < F.size(); ++j) {
    const auto pf = F[j].pareto_form();
    if (!pf || (j > 0 && pf->alpha != alpha)) {
      throw std::invalid_argument("quantile_mixture: general matrices need Pareto margins with a common alpha");
    }
    alpha = pf->alpha;
    theta.push_back(pf->theta);
  }
  for (std::size_t i = 0; i < L.size(); ++i) {
    for (double v : L.row(i)) {
      if (!(v >= 0.0)) throw std::invalid_argument("quantile_mixture: matrix must be nonnegative");
    }
  }
  const auto mixed = L.apply(theta);
  std::vector<Distribution> out;
  for (double t : mixed) {
    out.push_back(t > 0.0 ? Distribution::pareto(alpha, t) : Distribution::point_mass(0.0));
  }
  return MarginVector(std::move(out));
}

}  // namespace riskagg
