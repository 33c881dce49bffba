#include "elastheat/rigid.hpp"

#include <cmath>
#include <stdexcept>

#include "elastheat/solvers.hpp"

namespace elastheat {

double affine_l2_inner(const Mesh& mesh, const RigidField& u, const RigidField& v) {
  // Edge-midpoint rule integrates the quadratic product exactly.
  double s = 0.0;
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    const auto& tri = mesh.triangles[t];
    const double w = mesh.triangle_area(t) / 3.0;
    for (int e = 0; e < 3; ++e) {
      const Vec2 m = 0.5 * (mesh.nodes[tri[e]] + mesh.nodes[tri[(e + 1) % 3]]);
      s += w * dot(u.at(m), v.at(m));
    }
  }
  return s;
}

namespace {

std::vector<double> nodal_interpolant(const Mesh& mesh, const RigidField& f) {
  std::vector<double> v(2 * mesh.node_count());
  for (int i = 0; i < mesh.node_count(); ++i) {
    const Vec2 val = f.at(mesh.nodes[i]);
    v[2 * i] = val.x;
    v[2 * i + 1] = val.y;
  }
  return v;
}

}  // namespace

RigidBasis rigid_basis(const Mesh& mesh) {
  if (mesh.total_area() <= 0.0) throw std::invalid_argument("rigid_basis: zero-area mesh");
  // Raw generators: e1, e2, rotation.
  std::vector<RigidField> raw = {
      {0.0, {1.0, 0.0}},
      {0.0, {0.0, 1.0}},
      {1.0, {0.0, 0.0}},
  };

  RigidBasis basis;
  basis.mesh_hash = mesh.content_hash();
  for (RigidField f : raw) {
    for (const RigidField& g : basis.fields) {
      const double c = affine_l2_inner(mesh, f, g);
      f.rot -= c * g.rot;
      f.shift = f.shift - c * g.shift;
    }
    const double nrm = std::sqrt(affine_l2_inner(mesh, f, f));
    if (nrm <= 1e-14) throw std::runtime_error("rigid_basis: degenerate Gram-Schmidt step");
    f.rot /= nrm;
    f.shift = (1.0 / nrm) * f.shift;
    basis.fields.push_back(f);
  }
  for (const RigidField& f : basis.fields) basis.nodal.push_back(nodal_interpolant(mesh, f));
  return basis;
}

std::vector<double> rigid_coefficients(std::span<const double> u, const RigidBasis& basis,
                                       const SparseSym& mass) {
  if (static_cast<int>(u.size()) != mass.size()) {
    throw std::invalid_argument("project_rigid: field does not match the basis mesh");
  }
  std::vector<double> mu(u.size());
  mass.multiply(u, mu);
  std::vector<double> coef(basis.size());
  for (int i = 0; i < basis.size(); ++i) coef[i] = dot_vec(basis.nodal[i], mu);
  return coef;
}

std::vector<double> project_rigid(std::span<const double> u, const RigidBasis& basis,
                                  const SparseSym& mass) {
  const std::vector<double> coef = rigid_coefficients(u, basis, mass);
  std::vector<double> out(u.size(), 0.0);
  for (int i = 0; i < basis.size(); ++i) axpy(coef[i], basis.nodal[i], out);
  return out;
}

std::array<std::vector<double>, 2> point_rigid_projection(Vec2 y, const RigidBasis& basis,
                                                          bool has_dirichlet) {
  const std::size_t n = basis.nodal.empty() ? 0 : basis.nodal[0].size();
  std::array<std::vector<double>, 2> cols = {std::vector<double>(n, 0.0),
                                             std::vector<double>(n, 0.0)};
  if (has_dirichlet) return cols;
  for (int i = 0; i < basis.size(); ++i) {
    const Vec2 wy = basis.fields[i].at(y);
    axpy(wy.x, basis.nodal[i], cols[0]);
    axpy(wy.y, basis.nodal[i], cols[1]);
  }
  return cols;
}

Mat2 rigid_equilibrium_matrix(const RigidBasis& basis, Vec2 x, Vec2 y) {
  Mat2 m;
  for (const RigidField& f : basis.fields) {
    const Vec2 wx = f.at(x);
    const Vec2 wy = f.at(y);
    m(0, 0) += wx.x * wy.x;
    m(0, 1) += wx.x * wy.y;
    m(1, 0) += wx.y * wy.x;
    m(1, 1) += wx.y * wy.y;
  }
  return m;
}

}  // namespace elastheat
