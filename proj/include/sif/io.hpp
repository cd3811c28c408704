#pragma once

#include "sif/detmap.hpp"
#include "sif/fptd.hpp"
#include "sif/markov.hpp"
#include "sif/mc.hpp"
#include "sif/model.hpp"

#include <json.hpp>

#include <fstream>
#include <string>
#include <vector>

namespace sif {

using nlohmann::json;

json to_json(const PeriodicFn& f);
/// `where` names the field in error messages.
PeriodicFn periodic_from_json(const json& j, const std::string& where);

json to_json(const SifModel& m);
SifModel model_from_json(const json& j);

/// Parses JSON text; syntax errors become ConfigError with line and column.
json parse_json(const std::string& text, const std::string& source);
json load_json(const std::string& path);
SifModel load_model(const std::string& path);

json to_json(const OrbitRecord& o);
json to_json(const ReturnMapReport& r);
json to_json(const LimitSpectrum& s);
json to_json(const SampleSummary& s);

/// "%.17g"; non-finite values spell nan, inf, -inf.
std::string format_double(double v);

/// Comma-separated rows with a header; '.' decimals, '\n' line ends.
class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::vector<std::string>& header);
    CsvWriter& operator<<(double v);
    CsvWriter& operator<<(long long v);
    CsvWriter& operator<<(const std::string& v);
    /// An empty field.
    CsvWriter& skip();
    void end_row();

private:
    void sep();
    std::ofstream os_;
    std::size_t columns_;
    std::size_t field_ = 0;
    std::string path_;
};

void write_json(const std::string& path, const json& j);

} // namespace sif
