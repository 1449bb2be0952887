#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "cutfem/mesh.hpp"

namespace cutfem {

// Quadrature on the reference triangle {x,y >= 0, x+y <= 1}; weights sum to 1/2.
struct QuadratureRule {
    std::vector<Vec2> points;
    std::vector<double> weights;
    int exactness = 0;
};

// Quadrature on the unit segment [0,1]; weights sum to 1.
struct SegmentQuadrature {
    std::vector<double> points;
    std::vector<double> weights;
    int exactness = 0;
};

// Fully symmetric positive-weight rule, exact for polynomials of total degree
// <= exactness (supported up to 10).
QuadratureRule triangle_quadrature(int exactness);

// Gauss-Legendre rule on [0,1], exact up to the requested degree (<= 10).
SegmentQuadrature segment_quadrature(int exactness);

// Lagrange P_p element on the reference triangle, p = 1, 2, 3. Nodes are the
// vertices, equispaced edge nodes for p >= 2 and the centroid for p = 3.
class ReferenceElement {
  public:
    explicit ReferenceElement(int degree);

    int degree() const { return degree_; }
    int node_count() const { return static_cast<int>(nodes_.size()); }
    const std::vector<Vec2> &nodes() const { return nodes_; }

    // Basis values at a reference point.
    Eigen::VectorXd values(const Vec2 &xi) const;
    // Reference gradients, one row per basis function.
    Eigen::MatrixXd gradients(const Vec2 &xi) const;
    // Directional derivative of the given order along a (not necessarily
    // unit) reference direction; orders above the degree evaluate to zero.
    Eigen::VectorXd directional(const Vec2 &xi, const Vec2 &dir, int order) const;

  private:
    int degree_;
    std::vector<Vec2> nodes_;
    Eigen::MatrixXd coeffs_; // basis i = sum_j coeffs_(i,j) * monomial_j
    Eigen::MatrixXd dx_, dy_; // monomial differentiation operators
};

// Affine map from the reference triangle onto a physical triangle.
struct ElementMap {
    Vec2 origin;
    Eigen::Matrix2d jac;     // columns v1-v0, v2-v0
    Eigen::Matrix2d jac_inv;
    double det = 0.0;

    ElementMap(const BackgroundMesh &mesh, int t);
    ElementMap(const Vec2 &a, const Vec2 &b, const Vec2 &c);

    Vec2 to_physical(const Vec2 &xi) const { return origin + jac * xi; }
    Vec2 to_reference(const Vec2 &x) const { return jac_inv * (x - origin); }
    // Reference direction whose pushforward is the physical direction d.
    Vec2 pull_direction(const Vec2 &d) const { return jac_inv * d; }
};

// P_p space on the active elements of a background mesh with a deterministic
// global numbering: vertex dofs first, then edge dofs, then cell dofs.
struct DiscreteSpace {
    const BackgroundMesh *mesh = nullptr;
    int degree = 1;
    int dof_count = 0;
    std::vector<Vec2> dof_coords;
    std::vector<char> element_active;
    std::vector<int> active_elements;
    std::vector<std::vector<int>> element_dofs; // local node order; empty when inactive
    ReferenceElement reference;

    explicit DiscreteSpace(int degree_) : degree(degree_), reference(degree_) {}
};

DiscreteSpace build_dof_map(const BackgroundMesh &mesh, const std::vector<char> &element_active, int degree);

// Nodal interpolant pi_h f: coefficient i = f(dof coordinate i).
Eigen::VectorXd lagrange_interpolate(const DiscreteSpace &space, const std::function<double(const Vec2 &)> &f);

} // namespace cutfem
