#include "shapegeo/path_energy.hpp"

#include "discrete_geometry.hpp"
#include "shapegeo/parallel.hpp"

#include <json.hpp>

#include <iomanip>
#include <limits>
#include <ostream>

namespace shapegeo {

MeshPath::MeshPath(std::shared_ptr<const Topology> topology, std::vector<std::vector<Vec3>> frames, double area_floor)
    : topology_(std::move(topology)), frames_(std::move(frames)), area_floor_(area_floor)
{
    if (frames_.size() < 2) throw PreconditionError("a path needs at least two frames");
    for (std::size_t i = 0; i < frames_.size(); ++i) {
        if (static_cast<int>(frames_[i].size()) != topology_->num_vertices()) {
            throw PreconditionError("frame " + std::to_string(i) + " has the wrong vertex count");
        }
        check_face_areas(*topology_, frames_[i], area_floor_, static_cast<int>(i));
    }
}

MeshPath MeshPath::linear(const TriMesh& start, const TriMesh& end, int intervals)
{
    if (intervals < 1) throw PreconditionError("path needs at least one interval");
    if (start.num_vertices() != end.num_vertices() || start.num_faces() != end.num_faces() ||
        !std::equal(start.faces().begin(), start.faces().end(), end.faces().begin())) {
        throw PreconditionError("start and end meshes do not share combinatorics");
    }
    std::vector<std::vector<Vec3>> frames(intervals + 1);
    frames.front().assign(start.vertices().begin(), start.vertices().end());
    frames.back().assign(end.vertices().begin(), end.vertices().end());
    for (int i = 1; i < intervals; ++i) {
        const double t = static_cast<double>(i) / intervals;
        frames[i].resize(start.num_vertices());
        for (int p = 0; p < start.num_vertices(); ++p) {
            frames[i][p] = start.vertex(p) + t * (end.vertex(p) - start.vertex(p));
        }
    }
    return MeshPath(start.topology(), std::move(frames), start.area_floor());
}

MeshPath MeshPath::from_meshes(std::span<const TriMesh> meshes)
{
    if (meshes.size() < 2) throw PreconditionError("a path needs at least two frames");
    std::vector<std::vector<Vec3>> frames;
    for (const auto& m : meshes) {
        if (m.num_vertices() != meshes[0].num_vertices() ||
            !std::equal(m.faces().begin(), m.faces().end(), meshes[0].faces().begin(), meshes[0].faces().end())) {
            throw PreconditionError("path meshes do not share combinatorics");
        }
        frames.emplace_back(m.vertices().begin(), m.vertices().end());
    }
    return MeshPath(meshes[0].topology(), std::move(frames), meshes[0].area_floor());
}

TriMesh MeshPath::mesh(int i) const
{
    return TriMesh(topology_, frames_.at(i), area_floor_);
}

TriMesh MeshPath::midpoint_mesh(int interval) const
{
    std::vector<Vec3> m(num_vertices());
    for (int p = 0; p < num_vertices(); ++p) m[p] = 0.5 * (frames_.at(interval)[p] + frames_.at(interval + 1)[p]);
    return TriMesh(topology_, std::move(m), area_floor_);
}

std::size_t MeshPath::num_free() const
{
    return 3u * static_cast<std::size_t>(num_vertices()) * static_cast<std::size_t>(num_frames() - 2);
}

void MeshPath::get_interior(std::span<double> out) const
{
    if (out.size() != num_free()) throw PreconditionError("interior buffer has the wrong size");
    std::size_t k = 0;
    for (int i = 1; i + 1 < num_frames(); ++i) {
        for (const Vec3& p : frames_[i]) {
            out[k++] = p[0];
            out[k++] = p[1];
            out[k++] = p[2];
        }
    }
}

void MeshPath::set_interior(std::span<const double> values)
{
    if (values.size() != num_free()) throw PreconditionError("interior buffer has the wrong size");
    std::size_t k = 0;
    for (int i = 1; i + 1 < num_frames(); ++i) {
        for (Vec3& p : frames_[i]) {
            p = Vec3(values[k], values[k + 1], values[k + 2]);
            k += 3;
        }
    }
}

std::span<Vec3> MeshPath::interior_frame(int i)
{
    if (i <= 0 || i >= num_frames() - 1) throw PreconditionError("boundary frames are fixed");
    return frames_[i];
}

MeshPath MeshPath::reversed() const
{
    return MeshPath(topology_, std::vector<std::vector<Vec3>>(frames_.rbegin(), frames_.rend()), area_floor_);
}

namespace {

/// d angle / d e1 and d angle / d e2 for the corner angle between e1 and e2.
void angle_gradient(const Vec3& e1, const Vec3& e2, Vec3& d1, Vec3& d2)
{
    const Vec3 cr = e1.cross(e2);
    const double s = cr.norm();
    const double c = e1.dot(e2);
    const Vec3 n = cr / s;
    const double denom = s * s + c * c;
    d1 = (c * e2.cross(n) - s * e2) / denom;
    d2 = (c * n.cross(e1) - s * e1) / denom;
}

struct IntervalResult {
    double horizontal = 0.0;
    double penalty = 0.0;
    std::vector<Vec3> grad_left;   // d / d frame i
    std::vector<Vec3> grad_right;  // d / d frame i+1
};

/// Energy of one interval and, optionally, its gradient with respect to both frames.
IntervalResult evaluate_interval(const PhiSpec& spec, const MeshPath& path, int interval, double lambda,
                                 bool with_gradient)
{
    const Topology& topo = path.combinatorics();
    const int nv = topo.num_vertices();
    const double dt = path.dt();
    const auto x0 = path.frame(interval);
    const auto x1 = path.frame(interval + 1);

    std::vector<Vec3> mid(nv), vel(nv);
    for (int p = 0; p < nv; ++p) {
        mid[p] = 0.5 * (x0[p] + x1[p]);
        vel[p] = (x1[p] - x0[p]) / dt;
    }
    check_face_areas(topo, mid, path.area_floor(), interval);

    detail::MeshGeometry g;
    detail::evaluate_geometry(topo, mid, g, interval);

    IntervalResult out;
    CompensatedSum<double> hor, pen;

    std::vector<double> g_area, g_deflection;
    std::vector<Vec3> g_vector_area, g_vector_mean, g_vel, g_mid;
    if (with_gradient) {
        g_area.assign(nv, 0.0);
        g_deflection.assign(nv, 0.0);
        g_vector_area.assign(nv, Vec3::Zero());
        g_vector_mean.assign(nv, Vec3::Zero());
        g_vel.assign(nv, Vec3::Zero());
        g_mid.assign(nv, Vec3::Zero());
    }

    for (int p = 0; p < nv; ++p) {
        const double A = g.vertex_area[p];
        const double H = g.mean[p];
        const double K = g.gauss[p];
        const Vec3& nu = g.normal[p];
        const Vec3& v = vel[p];
        const double phi = spec(H, K);
        const double vn = v.dot(nu);
        const double vt2 = std::max(0.0, v.squaredNorm() - vn * vn);
        hor += dt * phi * vn * vn * A;
        pen += dt * vt2 * A;

        if (!with_gradient) continue;

        const double w = dt;
        const double g_phi = w * vn * vn * A;
        const double gH = g_phi * spec.d_mean(H, K);
        const double gK = g_phi * spec.d_gauss(H, K);
        double gA = w * (phi * vn * vn + lambda * vt2);
        const double g_vn = 2.0 * w * A * vn * (phi - lambda);
        g_vel[p] = 2.0 * w * lambda * A * v + g_vn * nu;
        const Vec3 g_nu = g_vn * v;

        // K = deflection / A
        g_deflection[p] = gK / A;
        gA -= gK * K / A;
        g_area[p] = gA;

        // H = -sign·|Hv| / |N|,  nu = N / |N|
        const double nN = g.vector_area_norm[p];
        const double nH = g.vector_mean_norm[p];
        const double g_normN = -gH * H / nN;
        if (nH > 0.0) g_vector_mean[p] = (-g.mean_sign[p] * gH / nN) * (g.vector_mean[p] / nH);
        g_vector_area[p] = (g_nu - g_nu.dot(nu) * nu) / nN + g_normN * nu;
    }
    out.horizontal = hor.value();
    out.penalty = pen.value();
    if (!with_gradient) return out;

    for (int f = 0; f < topo.num_faces(); ++f) {
        const Face& t = topo.face(f);
        const detail::FaceGeometry& fg = g.faces[f];
        double g_face_area = 0.0;
        Vec3 g_area_vector = Vec3::Zero();
        for (int c = 0; c < 3; ++c) {
            g_face_area += g_area[t[c]] / 3.0;
            g_area_vector += g_vector_area[t[c]] / 3.0;
        }
        g_area_vector += g_face_area * fg.normal;

        // corner terms: angle deficit and cotangent weights of the opposite edge
        for (int c = 0; c < 3; ++c) {
            const int i0 = t[c];
            const int a = t[(c + 1) % 3];
            const int b = t[(c + 2) % 3];
            const Vec3 u = mid[a] - mid[b];
            const Vec3 gd = g_vector_mean[a] - g_vector_mean[b];
            g_mid[a] += 0.5 * fg.cot[c] * gd;
            g_mid[b] -= 0.5 * fg.cot[c] * gd;
            const double g_cot = 0.5 * gd.dot(u);
            const double sin_angle = std::sin(fg.angle[c]);
            const double g_angle = -g_deflection[i0] - g_cot / (sin_angle * sin_angle);

            Vec3 d1, d2;
            angle_gradient(mid[a] - mid[i0], mid[b] - mid[i0], d1, d2);
            g_mid[a] += g_angle * d1;
            g_mid[b] += g_angle * d2;
            g_mid[i0] -= g_angle * (d1 + d2);
        }

        // area vector (1/2)(p1-p0)x(p2-p0)
        const Vec3& p0 = mid[t[0]];
        const Vec3& p1 = mid[t[1]];
        const Vec3& p2 = mid[t[2]];
        g_mid[t[0]] += 0.5 * (p1 - p2).cross(g_area_vector);
        g_mid[t[1]] += 0.5 * (p2 - p0).cross(g_area_vector);
        g_mid[t[2]] += 0.5 * (p0 - p1).cross(g_area_vector);
    }

    out.grad_left.resize(nv);
    out.grad_right.resize(nv);
    for (int p = 0; p < nv; ++p) {
        out.grad_left[p] = 0.5 * g_mid[p] - g_vel[p] / dt;
        out.grad_right[p] = 0.5 * g_mid[p] + g_vel[p] / dt;
    }
    return out;
}

EnergyBreakdown assemble(std::span<const IntervalResult> parts, double lambda)
{
    EnergyBreakdown e;
    e.lambda = lambda;
    CompensatedSum<double> hor, pen;
    for (const auto& r : parts) {
        e.horizontal_per_interval.push_back(r.horizontal);
        e.penalty_per_interval.push_back(r.penalty);
        hor += r.horizontal;
        pen += r.penalty;
    }
    e.horizontal = hor.value();
    e.penalty = pen.value();
    e.total = e.horizontal + lambda * e.penalty;
    return e;
}

std::vector<IntervalResult> evaluate_all(const PhiSpec& spec, const MeshPath& path, double lambda, bool with_gradient)
{
    spec.validate();
    if (!(lambda >= 0.0)) throw PreconditionError("penalty weight must be nonnegative");
    std::vector<IntervalResult> parts(path.num_intervals());
    const int min_chunk = std::max(1, 4000 / std::max(1, path.num_vertices()));
    parallel_for(
        path.num_intervals(),
        [&](int i) { parts[i] = evaluate_interval(spec, path, i, lambda, with_gradient); },
        min_chunk);
    return parts;
}

} // namespace

double horizontal_energy(const PhiSpec& spec, const MeshPath& path)
{
    return evaluate_energy(spec, path, 0.0).horizontal;
}

double penalty_energy(const MeshPath& path)
{
    return evaluate_energy(PhiSpec{}, path, 0.0).penalty;
}

EnergyBreakdown evaluate_energy(const PhiSpec& spec, const MeshPath& path, double lambda)
{
    return assemble(evaluate_all(spec, path, lambda, false), lambda);
}

EnergyAndGradient total_energy_and_gradient(const PhiSpec& spec, const MeshPath& path, double lambda)
{
    const auto parts = evaluate_all(spec, path, lambda, true);
    EnergyAndGradient out;
    out.energy = assemble(parts, lambda);

    const int nv = path.num_vertices();
    const int interior = path.num_frames() - 2;
    out.gradient.assign(static_cast<std::size_t>(interior) * nv, Vec3::Zero());
    // frame i (1..N-1) receives the right side of interval i-1 and the left side of interval i
    for (int i = 1; i <= interior; ++i) {
        Vec3* g = out.gradient.data() + static_cast<std::size_t>(i - 1) * nv;
        for (int p = 0; p < nv; ++p) g[p] = parts[i - 1].grad_right[p] + parts[i].grad_left[p];
    }
    return out;
}

void write_energy_json(const EnergyBreakdown& energy, std::ostream& out)
{
    nlohmann::ordered_json j;
    j["horizontal"] = energy.horizontal;
    j["penalty"] = energy.penalty;
    j["lambda"] = energy.lambda;
    j["total"] = energy.total;
    j["horizontal_per_interval"] = energy.horizontal_per_interval;
    j["penalty_per_interval"] = energy.penalty_per_interval;
    out << j.dump(2) << '\n';
}

void write_energy_csv(const EnergyBreakdown& energy, std::ostream& out)
{
    out << std::setprecision(std::numeric_limits<double>::max_digits10);
    out << "interval,t_mid,horizontal,penalty\n";
    const auto n = energy.horizontal_per_interval.size();
    for (std::size_t i = 0; i < n; ++i) {
        out << i << ',' << (static_cast<double>(i) + 0.5) / static_cast<double>(n) << ','
            << energy.horizontal_per_interval[i] << ',' << energy.penalty_per_interval[i] << '\n';
    }
}

} // namespace shapegeo
