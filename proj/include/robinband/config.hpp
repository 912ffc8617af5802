#ifndef ROBINBAND_CONFIG_HPP
#define ROBINBAND_CONFIG_HPP

#include <map>
#include <string>
#include <vector>

namespace robinband::harness {

// Key/value configuration with [section] headers. Keys are addressed as
// "section.key"; values are free-form strings parsed on access.
class Config {
  public:
    static Config parse_file(const std::string& path);
    static Config parse_string(const std::string& text);

    bool has(const std::string& key) const;
    std::string get(const std::string& key) const;
    std::string get_or(const std::string& key, const std::string& def) const;
    double get_double(const std::string& key) const;
    double get_double_or(const std::string& key, double def) const;
    int get_int(const std::string& key) const;
    int get_int_or(const std::string& key, int def) const;
    // comma-separated list of reals
    std::vector<double> get_list(const std::string& key) const;

    void set(const std::string& key, const std::string& value);
    const std::map<std::string, std::string>& entries() const { return kv_; }

  private:
    std::map<std::string, std::string> kv_;
};

} // namespace robinband::harness

#endif
