#include "robinband/report.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include "robinband/errors.hpp"

namespace robinband::harness {

void Report::set(const std::string& key, const std::string& value) {
    values_.emplace_back(key, value);
}

void Report::set(const std::string& key, double value) {
    std::ostringstream os;
    os << std::setprecision(15) << value;
    values_.emplace_back(key, os.str());
}

void Report::set(const std::string& key, int value) {
    values_.emplace_back(key, std::to_string(value));
}

void Report::add_check(const std::string& name, bool pass,
                       const std::string& detail) {
    checks_.push_back({name, pass, detail});
}

void Report::add_timing(const std::string& stage, double seconds) {
    timings_.emplace_back(stage, seconds);
}

bool Report::all_passed() const { return checks_failed() == 0; }

int Report::checks_failed() const {
    int n = 0;
    for (const auto& c : checks_)
        if (!c.pass) ++n;
    return n;
}

void Report::write(std::ostream& os) const {
    for (const auto& [k, v] : values_) os << k << " = " << v << "\n";
    for (const auto& c : checks_)
        os << "check." << c.name << " = " << (c.pass ? "pass" : "FAIL")
           << (c.detail.empty() ? "" : "  # " + c.detail) << "\n";
    for (const auto& [k, v] : timings_)
        os << "timing." << k << " = " << std::setprecision(4) << v << "\n";
}

void Report::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw Error("Report::save: cannot open " + path);
    write(out);
}

std::string Report::summary() const {
    std::ostringstream os;
    for (const auto& c : checks_)
        os << (c.pass ? "[PASS] " : "[FAIL] ") << c.name
           << (c.detail.empty() ? "" : "  (" + c.detail + ")") << "\n";
    os << checks_failed() << " of " << checks_.size() << " checks failed\n";
    return os.str();
}

void write_csv(const std::string& path, const std::vector<std::string>& columns,
               const std::vector<std::vector<double>>& rows) {
    std::ofstream out(path);
    if (!out) throw Error("write_csv: cannot open " + path);
    for (size_t i = 0; i < columns.size(); ++i)
        out << columns[i] << (i + 1 < columns.size() ? "," : "\n");
    out << std::setprecision(15);
    for (const auto& row : rows) {
        for (size_t i = 0; i < row.size(); ++i)
            out << row[i] << (i + 1 < row.size() ? "," : "\n");
    }
}

} // namespace robinband::harness
