#include "shapegeo/curvature.hpp"

#include "discrete_geometry.hpp"

#include <algorithm>
#include <iomanip>
#include <limits>
#include <ostream>

namespace shapegeo {

namespace {

std::vector<Vec3> displaced(const TriMesh& mesh, const CurvatureField& field, const ScalarField& speed, double eps)
{
    std::vector<Vec3> x(mesh.vertices().begin(), mesh.vertices().end());
    for (std::size_t v = 0; v < x.size(); ++v) x[v] += eps * speed[v] * field.unit_normal[v];
    return x;
}

void check_variation_inputs(const TriMesh& mesh, const ScalarField& speed, double h)
{
    if (static_cast<int>(speed.size()) != mesh.num_vertices()) {
        throw PreconditionError("normal speed has " + std::to_string(speed.size()) + " entries, mesh has " +
                                std::to_string(mesh.num_vertices()) + " vertices");
    }
    if (!(h >= 1e-8)) throw PreconditionError("finite-difference step below 1e-8 is dominated by cancellation");
}

} // namespace

CurvatureField compute_curvature(const TriMesh& mesh)
{
    detail::MeshGeometry g;
    detail::evaluate_geometry(*mesh.topology(), mesh.vertices(), g);

    CurvatureField out;
    out.vertex_area = ScalarField(std::move(g.vertex_area));
    out.star_area = ScalarField(std::move(g.star_area));
    out.angular_deflection = ScalarField(std::move(g.deflection));
    out.mean_curvature = ScalarField(std::move(g.mean));
    out.gauss_curvature = ScalarField(std::move(g.gauss));
    out.vector_area = VectorField(std::move(g.vector_area));
    out.vector_mean_curvature = VectorField(std::move(g.vector_mean));
    out.unit_normal = VectorField(std::move(g.normal));
    return out;
}

double angular_deflection(const TriMesh& mesh, int vertex)
{
    if (vertex < 0 || vertex >= mesh.num_vertices()) {
        throw PreconditionError("vertex index " + std::to_string(vertex) + " out of range");
    }
    double sum = 0.0;
    for (int f : mesh.star(vertex)) {
        const Face& t = mesh.faces()[f];
        const int c = t[0] == vertex ? 0 : (t[1] == vertex ? 1 : 2);
        double angle = 0.0, cot = 0.0;
        detail::corner(mesh.vertex(t[c]), mesh.vertex(t[(c + 1) % 3]), mesh.vertex(t[(c + 2) % 3]), angle, cot);
        sum += angle;
    }
    return 2.0 * std::numbers::pi - sum;
}

double total_angular_deflection(const CurvatureField& field)
{
    CompensatedSum<double> s;
    for (double d : field.angular_deflection) s += d;
    return s.value();
}

AreaVariationReport verify_volume_variation(const TriMesh& mesh, const ScalarField& normal_speed, double h)
{
    check_variation_inputs(mesh, normal_speed, h);
    const CurvatureField field = compute_curvature(mesh);

    const double area_plus = surface_area(mesh.with_vertices(displaced(mesh, field, normal_speed, h)));
    const double area_minus = surface_area(mesh.with_vertices(displaced(mesh, field, normal_speed, -h)));

    AreaVariationReport r{};
    r.finite_difference = (area_plus - area_minus) / (2.0 * h);
    CompensatedSum<double> formula;
    for (std::size_t v = 0; v < field.size(); ++v) {
        formula += -field.mean_curvature[v] * normal_speed[v] * field.vertex_area[v];
    }
    r.formula = formula.value();
    const double diff = std::abs(r.finite_difference - r.formula);
    r.relative_discrepancy = diff == 0.0 ? 0.0 : diff / std::max(std::abs(r.formula), std::abs(r.finite_difference));
    return r;
}

GaussVariationReport verify_gauss_variation(const TriMesh& mesh, const ScalarField& normal_speed, double h)
{
    check_variation_inputs(mesh, normal_speed, h);
    const CurvatureField field = compute_curvature(mesh);
    const CurvatureField plus = compute_curvature(mesh.with_vertices(displaced(mesh, field, normal_speed, h)));
    const CurvatureField minus = compute_curvature(mesh.with_vertices(displaced(mesh, field, normal_speed, -h)));

    const std::size_t n = field.size();
    GaussVariationReport r{ScalarField(n), ScalarField(n), 0.0};
    double scale = 0.0;
    for (std::size_t v = 0; v < n; ++v) {
        r.finite_difference[v] = (plus.gauss_curvature[v] - minus.gauss_curvature[v]) / (2.0 * h);
        r.formula[v] = field.mean_curvature[v] * field.gauss_curvature[v] * normal_speed[v];
        scale = std::max(scale, std::abs(r.formula[v]));
    }
    for (std::size_t v = 0; v < n; ++v) {
        const double diff = std::abs(r.finite_difference[v] - r.formula[v]);
        if (diff == 0.0) continue;
        const double denom = std::max(std::abs(r.formula[v]), 1e-12 * scale);
        r.max_relative_discrepancy =
            std::max(r.max_relative_discrepancy, denom > 0.0 ? diff / denom : std::numeric_limits<double>::infinity());
    }
    return r;
}

void write_curvature_csv(const CurvatureField& field, std::ostream& out)
{
    out << std::setprecision(std::numeric_limits<double>::max_digits10);
    out << "index,area,H,K,nx,ny,nz\n";
    for (std::size_t v = 0; v < field.size(); ++v) {
        const Vec3& n = field.unit_normal[v];
        out << v << ',' << field.vertex_area[v] << ',' << field.mean_curvature[v] << ','
            << field.gauss_curvature[v] << ',' << n[0] << ',' << n[1] << ',' << n[2] << '\n';
    }
}

} // namespace shapegeo
