#ifndef SVRP_CONFIG_HPP
#define SVRP_CONFIG_HPP

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace svrp {

// Plain-text key=value configuration. Lines are `key = value`; blank lines
// and lines starting with # are ignored; later assignments win. Values are
// parsed on access, so one file can feed several consumers that each read
// their own keys. Lists are comma-separated.
class KeyValueConfig {
public:
    KeyValueConfig() = default;

    static KeyValueConfig from_file(const std::string& path);   // std::runtime_error when unreadable
    static KeyValueConfig from_string(const std::string& text); // std::invalid_argument on a malformed line

    bool has(const std::string& key) const;
    void set(const std::string& key, const std::string& value);

    // Each getter throws std::invalid_argument naming the key when the value
    // does not parse. The overloads without a default throw when the key is
    // absent.
    std::string get_string(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    int get_int(const std::string& key, int fallback) const;
    double get_double(const std::string& key, double fallback) const;
    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
    std::vector<int> get_ints(const std::string& key, const std::vector<int>& fallback) const;
    std::vector<double> get_doubles(const std::string& key,
                                    const std::vector<double>& fallback) const;
    std::vector<std::uint64_t> get_u64s(const std::string& key,
                                        const std::vector<std::uint64_t>& fallback) const;
    std::vector<std::string> get_strings(const std::string& key,
                                         const std::vector<std::string>& fallback) const;

    const std::map<std::string, std::string>& entries() const { return kv_; }

    // Keys present in the file but never read; lets the CLI flag typos.
    std::vector<std::string> unread_keys() const;

private:
    std::map<std::string, std::string> kv_;
    mutable std::set<std::string> read_;
};

}  // namespace svrp

#endif
