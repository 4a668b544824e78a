#pragma once
// Serialization of solved profiles.  The CSV form has the fixed columns
// r,phi,dphi,ddphi,f,R,H with f shifted to start at zero; the JSON form keeps
// the solver's parameters, endpoint kinds and classification next to the same
// columns.  Numbers are printed with the shortest representation that parses
// back to the identical double, so repeated runs are byte-identical.

#include <charconv>
#include <istream>
#include <memory>
#include <ostream>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include <nlohmann/json.hpp>

#include "yamabe/profile.hpp"

namespace yamabe {

inline std::string format_double(double v) {
    if (v == 0.0) v = 0.0;  // canonicalize the sign of zero
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline void write_profile_csv(const SolitonProfile& prof, std::ostream& os) {
    os << "r,phi,dphi,ddphi,f,R,H\n";
    if (prof.samples.empty()) return;
    const double f0 = prof.samples.front().f;
    const double nm1 = static_cast<double>(prof.params.n - 1);
    for (const auto& s : prof.samples) {
        double mean_curv = nm1 * s.dphi / s.phi;
        os << format_double(s.r) << ',' << format_double(s.phi) << ','
           << format_double(s.dphi) << ',' << format_double(s.ddphi) << ','
           << format_double(s.f - f0) << ',' << format_double(s.R) << ','
           << format_double(mean_curv) << '\n';
    }
}

inline nlohmann::ordered_json profile_to_json(const SolitonProfile& prof) {
    nlohmann::ordered_json j;
    j["format"] = "soliton-profile";
    j["params"] = {{"n", prof.params.n}, {"rho", prof.params.rho}, {"Rbar", prof.params.Rbar}};
    j["domain"] = {{"r_left", prof.r_left},
                   {"r_right", prof.r_right},
                   {"left_kind", to_string(prof.left_kind)},
                   {"right_kind", to_string(prof.right_kind)},
                   {"two_sided", prof.two_sided},
                   {"from_origin", prof.from_origin},
                   {"reflected", prof.reflected}};
    j["classification"] = to_string(prof.classification);
    j["compact_inconsistency"] = prof.compact_inconsistency;
    j["critical_points"] = prof.critical_points;
    nlohmann::ordered_json cols;
    std::vector<double> r, phi, dphi, ddphi, f, R, H;
    const double nm1 = static_cast<double>(prof.params.n - 1);
    for (const auto& s : prof.samples) {
        r.push_back(s.r);
        phi.push_back(s.phi);
        dphi.push_back(s.dphi);
        ddphi.push_back(s.ddphi);
        f.push_back(s.f);
        R.push_back(s.R);
        H.push_back(nm1 * s.dphi / s.phi);
    }
    cols["r"] = r;
    cols["phi"] = phi;
    cols["dphi"] = dphi;
    cols["ddphi"] = ddphi;
    cols["f"] = f;
    cols["R"] = R;
    cols["H"] = H;
    j["columns"] = cols;
    return j;
}

struct LoadedProfile {
    SolitonProfile profile;
    bool has_params = false;  // CSV input carries no parameters
};

namespace detail {

inline EndpointKind endpoint_kind_from_string(const std::string& s) {
    if (s == "critical-point") return EndpointKind::CriticalPoint;
    if (s == "blow-up") return EndpointKind::BlowUp;
    if (s == "integration-limit") return EndpointKind::IntegrationLimit;
    throw std::invalid_argument("unknown endpoint kind: " + s);
}

inline ProfileClass profile_class_from_string(const std::string& s) {
    if (s == "RotationallySymmetric") return ProfileClass::RotationallySymmetric;
    if (s == "CylinderType") return ProfileClass::CylinderType;
    if (s == "Undetermined") return ProfileClass::Undetermined;
    throw std::invalid_argument("unknown classification: " + s);
}

inline double parse_double(const std::string& field) {
    const char* first = field.data();
    const char* last = field.data() + field.size();
    while (first < last && (*first == ' ' || *first == '\t')) ++first;
    while (last > first && (*(last - 1) == ' ' || *(last - 1) == '\t' || *(last - 1) == '\r'))
        --last;
    double v = 0.0;
    auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc{} || res.ptr != last)
        throw std::invalid_argument("malformed numeric field: '" + field + "'");
    return v;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur.push_back(ch);
        }
    }
    out.push_back(cur);
    return out;
}

// infer endpoint kinds, build the interpolation backend and classify
inline void finish_loaded_profile(SolitonProfile& prof, bool columns_trusted) {
    auto& smp = prof.samples;
    if (smp.size() < 2) throw std::invalid_argument("profile needs at least two samples");
    if (smp.front().r > smp.back().r) std::reverse(smp.begin(), smp.end());
    std::vector<double> r, phi, dphi, ddphi, f;
    for (const auto& s : smp) {
        r.push_back(s.r);
        phi.push_back(s.phi);
        dphi.push_back(s.dphi);
        ddphi.push_back(s.ddphi);
        f.push_back(s.f);
    }
    for (size_t i = 0; i + 1 < r.size(); ++i)
        if (!(r[i + 1] > r[i]))
            throw std::invalid_argument("profile rows must be strictly monotone in r");

    prof.r_left = r.front();
    prof.r_right = r.back();
    prof.curve.set_params(prof.params);
    prof.curve.set_hermite(HermiteCurve(r, phi, dphi, ddphi),
                           HermiteCurve(r, f, phi, dphi));

    if (!columns_trusted) {
        // conservative endpoint inference for bare column data: an endpoint is
        // critical only when the warping value has essentially reached zero
        double phi_hi = 0.0;
        for (double v : phi) phi_hi = std::max(phi_hi, std::abs(v));
        double thr = std::max(2e-8, 1e-6 * phi_hi);
        prof.left_kind = (std::abs(phi.front()) <= thr) ? EndpointKind::CriticalPoint
                                                        : EndpointKind::IntegrationLimit;
        prof.right_kind = (std::abs(phi.back()) <= thr) ? EndpointKind::CriticalPoint
                                                        : EndpointKind::IntegrationLimit;
        prof.two_sided = false;
        prof.from_origin = false;
        prof.critical_points.clear();
        if (prof.left_kind == EndpointKind::CriticalPoint)
            prof.critical_points.push_back(prof.r_left);
        if (prof.right_kind == EndpointKind::CriticalPoint)
            prof.critical_points.push_back(prof.r_right);
        classify(prof);
    }
}

}  // namespace detail

// Reads column data written by write_profile_csv or compatible files.  The
// header must contain r,phi,dphi; ddphi is differentiated from dphi when
// absent and f is reconstructed by integrating phi when absent.  No solver
// parameters travel with a CSV, so endpoint kinds are inferred conservatively
// and the classification can only report what the columns force.
inline LoadedProfile read_profile_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw std::invalid_argument("empty profile file");
    auto names = detail::split_csv_line(line);
    int ir = -1, iphi = -1, idphi = -1, iddphi = -1, iff = -1;
    for (size_t k = 0; k < names.size(); ++k) {
        if (names[k] == "r") ir = static_cast<int>(k);
        else if (names[k] == "phi") iphi = static_cast<int>(k);
        else if (names[k] == "dphi") idphi = static_cast<int>(k);
        else if (names[k] == "ddphi") iddphi = static_cast<int>(k);
        else if (names[k] == "f") iff = static_cast<int>(k);
    }
    if (ir < 0 || iphi < 0 || idphi < 0)
        throw std::invalid_argument("profile CSV must have columns r,phi,dphi");

    LoadedProfile out;
    auto& smp = out.profile.samples;
    while (std::getline(is, line)) {
        if (line.empty() || line == "\r") continue;
        auto fields = detail::split_csv_line(line);
        if (fields.size() < names.size())
            throw std::invalid_argument("profile row has too few fields");
        ProfileSample s;
        s.r = detail::parse_double(fields[static_cast<size_t>(ir)]);
        s.phi = detail::parse_double(fields[static_cast<size_t>(iphi)]);
        s.dphi = detail::parse_double(fields[static_cast<size_t>(idphi)]);
        if (iddphi >= 0) s.ddphi = detail::parse_double(fields[static_cast<size_t>(iddphi)]);
        if (iff >= 0) s.f = detail::parse_double(fields[static_cast<size_t>(iff)]);
        smp.push_back(s);
    }
    if (smp.size() < 2) throw std::invalid_argument("profile needs at least two samples");
    if (smp.front().r > smp.back().r) std::reverse(smp.begin(), smp.end());

    if (iddphi < 0) {  // centered differences of dphi, one-sided at the ends
        size_t m = smp.size();
        for (size_t i = 0; i < m; ++i) {
            size_t a = (i == 0) ? 0 : i - 1;
            size_t b = (i + 1 == m) ? m - 1 : i + 1;
            smp[i].ddphi = (smp[b].dphi - smp[a].dphi) / (smp[b].r - smp[a].r);
        }
    }
    if (iff < 0) {  // cumulative integral of the phi interpolant, f = 0 at the left end
        std::vector<double> r, phi, dphi, ddphi;
        for (const auto& s : smp) {
            r.push_back(s.r);
            phi.push_back(s.phi);
            dphi.push_back(s.dphi);
            ddphi.push_back(s.ddphi);
        }
        HermiteCurve pc(r, phi, dphi, ddphi);
        double acc = 0.0;
        smp[0].f = 0.0;
        for (size_t i = 0; i + 1 < smp.size(); ++i) {
            acc += pc.segment_at(0.5 * (r[i] + r[i + 1])).integral();
            smp[i + 1].f = acc;
        }
    }
    for (auto& s : smp) s.R = std::numeric_limits<double>::quiet_NaN();  // rho unknown

    detail::finish_loaded_profile(out.profile, false);
    out.has_params = false;
    return out;
}

inline LoadedProfile read_profile_json(std::istream& is) {
    nlohmann::json j = nlohmann::json::parse(is);
    if (!j.contains("columns")) throw std::invalid_argument("profile JSON lacks a columns object");
    const auto& cols = j.at("columns");
    auto arr = [&cols](const char* name) {
        if (!cols.contains(name))
            throw std::invalid_argument(std::string("profile JSON lacks column ") + name);
        return cols.at(name).get<std::vector<double>>();
    };
    auto r = arr("r"), phi = arr("phi"), dphi = arr("dphi"), ddphi = arr("ddphi"), f = arr("f");
    auto Rcol = arr("R");
    size_t m = r.size();
    if (m < 2 || phi.size() != m || dphi.size() != m || ddphi.size() != m || f.size() != m ||
        Rcol.size() != m)
        throw std::invalid_argument("profile JSON columns have inconsistent lengths");

    LoadedProfile out;
    SolitonProfile& prof = out.profile;
    if (j.contains("params")) {
        const auto& p = j.at("params");
        prof.params.n = p.at("n").get<int>();
        prof.params.rho = p.at("rho").get<double>();
        prof.params.Rbar = p.at("Rbar").get<double>();
        check_params(prof.params);
        out.has_params = true;
    }
    for (size_t i = 0; i < m; ++i) {
        ProfileSample s;
        s.r = r[i];
        s.phi = phi[i];
        s.dphi = dphi[i];
        s.ddphi = ddphi[i];
        s.f = f[i];
        s.R = Rcol[i];
        prof.samples.push_back(s);
    }
    bool trusted = j.contains("domain");
    if (trusted) {
        const auto& d = j.at("domain");
        prof.left_kind = detail::endpoint_kind_from_string(d.at("left_kind").get<std::string>());
        prof.right_kind = detail::endpoint_kind_from_string(d.at("right_kind").get<std::string>());
        prof.two_sided = d.at("two_sided").get<bool>();
        prof.from_origin = d.at("from_origin").get<bool>();
        prof.reflected = d.value("reflected", false);
    }
    detail::finish_loaded_profile(prof, trusted);
    if (trusted) {
        if (j.contains("critical_points"))
            prof.critical_points = j.at("critical_points").get<std::vector<double>>();
        if (j.contains("classification"))
            prof.classification =
                detail::profile_class_from_string(j.at("classification").get<std::string>());
        if (j.contains("compact_inconsistency"))
            prof.compact_inconsistency = j.at("compact_inconsistency").get<bool>();
    }
    return out;
}

// convenience used by the command-line driver: dispatch on file content
inline LoadedProfile read_profile_auto(std::istream& is) {
    int c = is.peek();
    if (c == '{') return read_profile_json(is);
    return read_profile_csv(is);
}

}  // namespace yamabe
