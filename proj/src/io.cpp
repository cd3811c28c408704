#include "sif/io.hpp"

#include "sif/error.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace sif {

namespace {

double number(const json& j, const char* key, const std::string& where)
{
    if (!j.contains(key)) throw ConfigError(where + ": missing field \"" + key + "\"");
    const json& v = j.at(key);
    if (!v.is_number()) throw ConfigError(where + "." + key + ": expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError(where + "." + key + ": must be finite");
    return x;
}

double number_or(const json& j, const char* key, double fallback, const std::string& where)
{
    return j.contains(key) ? number(j, key, where) : fallback;
}

} // namespace

json to_json(const PeriodicFn& f)
{
    switch (f.kind()) {
    case PeriodicFn::Kind::constant:
        return {{"type", "constant"}, {"value", f.mean()}};
    case PeriodicFn::Kind::sinusoid:
        return {{"type", "sinusoid"}, {"offset", f.offset()}, {"amplitude", f.amplitude()}, {"phase", f.phase()}};
    case PeriodicFn::Kind::fourier: {
        json hs = json::array();
        for (const auto& h : f.harmonics()) hs.push_back({{"cos", h.cos_coeff}, {"sin", h.sin_coeff}});
        return {{"type", "fourier"}, {"a0", f.mean()}, {"harmonics", hs}};
    }
    }
    return {};
}

PeriodicFn periodic_from_json(const json& j, const std::string& where)
{
    if (j.is_number()) return PeriodicFn::constant(j.get<double>());
    if (!j.is_object()) throw ConfigError(where + ": expected an object or a number");
    if (!j.contains("type") || !j.at("type").is_string())
        throw ConfigError(where + ": missing \"type\" (constant, sinusoid or fourier)");
    const auto type = j.at("type").get<std::string>();
    if (type == "constant") return PeriodicFn::constant(number(j, "value", where));
    if (type == "sinusoid")
        return PeriodicFn::sinusoid(number(j, "offset", where), number(j, "amplitude", where),
                                    number_or(j, "phase", 0.0, where));
    if (type == "fourier") {
        std::vector<Harmonic> hs;
        if (j.contains("harmonics")) {
            const json& arr = j.at("harmonics");
            if (!arr.is_array()) throw ConfigError(where + ".harmonics: expected an array");
            for (std::size_t k = 0; k < arr.size(); ++k) {
                const std::string w = where + ".harmonics[" + std::to_string(k) + "]";
                hs.push_back({number_or(arr[k], "cos", 0.0, w), number_or(arr[k], "sin", 0.0, w)});
            }
        }
        if (hs.size() > PeriodicFn::max_harmonics)
            throw ConfigError(where + ": at most " + std::to_string(PeriodicFn::max_harmonics) + " harmonics");
        return PeriodicFn::fourier(number_or(j, "a0", 0.0, where), std::move(hs));
    }
    throw ConfigError(where + ": unknown type \"" + type + "\"");
}

json to_json(const SifModel& m)
{
    return {{"gamma", m.gamma()},
            {"eps", m.eps()},
            {"input", to_json(m.input())},
            {"threshold", to_json(m.threshold())},
            {"reset", to_json(m.reset())}};
}

SifModel model_from_json(const json& j)
{
    if (!j.is_object()) throw ConfigError("model: expected a JSON object");
    for (const char* key : {"input", "threshold", "reset"})
        if (!j.contains(key)) throw ConfigError(std::string("model: missing field \"") + key + "\"");
    return SifModel(number(j, "gamma", "model"), number_or(j, "eps", 0.0, "model"),
                    periodic_from_json(j.at("input"), "input"), periodic_from_json(j.at("threshold"), "threshold"),
                    periodic_from_json(j.at("reset"), "reset"));
}

json parse_json(const std::string& text, const std::string& source)
{
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        std::size_t line = 1, col = 1;
        for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw ConfigError(source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + e.what());
    }
}

json load_json(const std::string& path)
{
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config " + path);
    std::stringstream ss;
    ss << is.rdbuf();
    return parse_json(ss.str(), path);
}

SifModel load_model(const std::string& path)
{
    return model_from_json(load_json(path));
}

json to_json(const OrbitRecord& o)
{
    return {{"phases", o.phases}, {"period", o.period}, {"winding", o.winding},
            {"multiplier", o.multiplier}, {"stable", o.stable}};
}

json to_json(const ReturnMapReport& r)
{
    json orbits = json::array();
    for (const auto& o : r.orbits) orbits.push_back(to_json(o));
    json disc = json::array();
    for (const auto& d : r.discontinuities)
        disc.push_back({{"phase", d.phase},
                        {"f", d.f_at},
                        {"f_star", d.f_star_at},
                        {"f_tilde", d.f_at - std::floor(d.f_at)},
                        {"f_star_tilde", d.f_star_at - std::floor(d.f_star_at)},
                        {"kind", d.kind == DiscontinuityKind::jump ? "jump" : "continuous_tangency"},
                        {"gap_verified", d.gap_verified}});
    const auto& c = r.conditions;
    json cond = {{"condA", {{"holds", c.condA.holds}, {"witness", c.condA.witness}}},
                 {"condB",
                  {{"holds", c.condB.holds}, {"min_margin", c.condB.min_margin}, {"argmin", c.condB.argmin}}},
                 {"condBprime", c.condBprime},
                 {"tangency_points", c.tangency_points},
                 {"notes", c.notes}};
    if (c.condB.closed_form_margin) cond["condB"]["closed_form_margin"] = *c.condB.closed_form_margin;
    json d = {{"d1", r.d.d1}, {"d2", r.d.d2}, {"d3", r.d.d3}, {"preimages", r.d.preimages},
              {"attracting_orbit", r.d.attracting_orbit}, {"diagnostics", r.d.diagnostics}};
    d["ell"] = r.d.ell ? json(*r.d.ell) : json(nullptr);
    return {{"conditions", cond},
            {"orbits", orbits},
            {"discontinuities", disc},
            {"image_set", r.image_set},
            {"d_conditions", d},
            {"continuous_theory_applies", r.continuous_theory_applies}};
}

json to_json(const LimitSpectrum& s)
{
    json entries = json::array();
    for (const auto& e : s.entries)
        entries.push_back({{"re", e.value.real()},
                           {"im", e.value.imag()},
                           {"modulus", std::abs(e.value)},
                           {"orbit", e.generator.orbit},
                           {"power", e.generator.power},
                           {"root", e.generator.root},
                           {"unstable", e.generator.unstable}});
    return {{"entries", entries}, {"cutoff", s.cutoff}, {"basis", s.basis}};
}

json to_json(const SampleSummary& s)
{
    return {{"mean", s.mean}, {"stdev", s.stdev}, {"skewness", s.skewness}, {"kurtosis", s.kurtosis}};
}

std::string format_double(double v)
{
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& header)
    : os_(path, std::ios::binary), columns_(header.size()), path_(path)
{
    if (!os_) throw ConfigError("cannot open " + path + " for writing");
    for (const auto& h : header) *this << h;
    end_row();
}

void CsvWriter::sep()
{
    if (field_ > 0) os_ << ',';
    ++field_;
}

CsvWriter& CsvWriter::operator<<(double v)
{
    sep();
    os_ << format_double(v);
    return *this;
}

CsvWriter& CsvWriter::operator<<(long long v)
{
    sep();
    os_ << v;
    return *this;
}

CsvWriter& CsvWriter::operator<<(const std::string& v)
{
    sep();
    os_ << v;
    return *this;
}

CsvWriter& CsvWriter::skip()
{
    sep();
    return *this;
}

void CsvWriter::end_row()
{
    if (field_ != columns_)
        throw ConfigError("CSV row with " + std::to_string(field_) + " fields, header has " + std::to_string(columns_));
    os_ << '\n';
    field_ = 0;
    if (!os_) throw ConfigError("write failed: " + path_);
}

void write_json(const std::string& path, const json& j)
{
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ConfigError("cannot open " + path + " for writing");
    os << j.dump(2) << '\n';
    if (!os) throw ConfigError("write failed: " + path);
}

} // namespace sif
