#ifndef ROBINBAND_REPORT_HPP
#define ROBINBAND_REPORT_HPP

#include <ostream>
#include <string>
#include <vector>

namespace robinband::harness {

// Structured run report: flat dotted keys rendered as nested key/value
// text, plus named pass/fail checks and stage timings.
class Report {
  public:
    void set(const std::string& key, const std::string& value);
    void set(const std::string& key, double value);
    void set(const std::string& key, int value);

    void add_check(const std::string& name, bool pass,
                   const std::string& detail = "");
    void add_timing(const std::string& stage, double seconds);

    bool all_passed() const;
    int checks_failed() const;

    void write(std::ostream& os) const;
    void save(const std::string& path) const;
    std::string summary() const; // human table of the checks

    struct Check {
        std::string name;
        bool pass;
        std::string detail;
    };
    const std::vector<Check>& checks() const { return checks_; }

  private:
    std::vector<std::pair<std::string, std::string>> values_;
    std::vector<Check> checks_;
    std::vector<std::pair<std::string, double>> timings_;
};

// Columnar CSV with a one-line header.
void write_csv(const std::string& path, const std::vector<std::string>& columns,
               const std::vector<std::vector<double>>& rows);

} // namespace robinband::harness

#endif
