#include "s2hess/jet.hpp"

#include "s2hess/stencil.hpp"

namespace s2hess {

ScalarJet::ScalarJet(const Grid& grid)
    : value(grid),
      grad(grid.dims(), ScalarField(grid)),
      hess(static_cast<std::size_t>(grid.dims()) * grid.dims(), ScalarField(grid)) {}

ScalarJet ScalarJet::from_field(const ScalarField& f) {
  ScalarJet j(f.grid());
  j.value = f;
  j.grad = gradient(f);
  j.hess = hessian(f);
  return j;
}

ScalarJet& ScalarJet::operator*=(double s) {
  value *= s;
  for (auto& g : grad) g *= s;
  for (auto& h : hess) h *= s;
  return *this;
}

ScalarJet& ScalarJet::operator+=(const ScalarJet& o) {
  value += o.value;
  for (std::size_t a = 0; a < grad.size(); ++a) grad[a] += o.grad[a];
  for (std::size_t a = 0; a < hess.size(); ++a) hess[a] += o.hess[a];
  return *this;
}

ScalarJet& ScalarJet::operator-=(const ScalarJet& o) {
  value -= o.value;
  for (std::size_t a = 0; a < grad.size(); ++a) grad[a] -= o.grad[a];
  for (std::size_t a = 0; a < hess.size(); ++a) hess[a] -= o.hess[a];
  return *this;
}

VectorJet::VectorJet(const Grid& grid, int components)
    : value(components, ScalarField(grid)),
      jac(components, std::vector<ScalarField>(grid.dims(), ScalarField(grid))) {}

VectorJet VectorJet::from_field(const VectorField& w) {
  VectorJet j(w.grid(), w.components());
  for (int i = 0; i < w.components(); ++i) {
    j.value[i] = w[i];
    j.jac[i] = gradient(w[i]);
  }
  return j;
}

VectorJet& VectorJet::operator*=(double s) {
  for (auto& v : value) v *= s;
  for (auto& row : jac)
    for (auto& d : row) d *= s;
  return *this;
}

VectorJet& VectorJet::operator-=(const VectorJet& o) {
  for (std::size_t i = 0; i < value.size(); ++i) {
    value[i] -= o.value[i];
    for (std::size_t a = 0; a < jac[i].size(); ++a) jac[i][a] -= o.jac[i][a];
  }
  return *this;
}

ScalarJet operator-(ScalarJet a, const ScalarJet& b) { return a -= b; }
VectorJet operator-(VectorJet a, const VectorJet& b) { return a -= b; }

}  // namespace s2hess
