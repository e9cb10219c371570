#pragma once

#include "looplab/circulation.hpp"
#include "looplab/fields.hpp"
#include "looplab/geometry.hpp"
#include "looplab/loop_operators.hpp"

#include <yaml-cpp/yaml.h>

#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace looplab {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Typed access to one YAML mapping. Every key read is recorded; finish() rejects the rest.
class Section {
public:
    Section(YAML::Node node, std::string path);

    bool has(const std::string& key) const;
    double number(const std::string& key, double def) const;
    double number(const std::string& key) const;
    int integer(const std::string& key, int def) const;
    std::string text(const std::string& key, const std::string& def) const;
    std::string text(const std::string& key) const;
    bool flag(const std::string& key, bool def) const;
    Vec3 vec(const std::string& key, const Vec3& def) const;
    std::vector<double> numbers(const std::string& key, const std::vector<double>& def) const;
    std::vector<int> integers(const std::string& key, const std::vector<int>& def) const;
    Section child(const std::string& key) const;
    YAML::Node raw(const std::string& key) const;
    std::optional<Section> optional_child(const std::string& key) const;

    void finish() const;
    const std::string& path() const { return path_; }
    int line() const;

private:
    YAML::Node get(const std::string& key) const;
    [[noreturn]] void fail(const YAML::Node& n, const std::string& key, const std::string& msg) const;

    YAML::Node node_;
    std::string path_;
    mutable std::set<std::string> seen_;
};

struct FieldConfig {
    std::string type = "abc";  // abc | wave | rotation | constant | mixed
    double A = 1.0, B = 0.8, C = 0.6;
    Vec3 wave_re{1, 0, 0}, wave_im{0, 0, 0}, wave_k{0, 0, 1};
    Vec3 constant{1, 0, 0};
    std::string time_law = "beltrami";  // beltrami | static | linear
    double rate = 0.0;
};

struct LoopConfig {
    std::string type = "circle";  // circle | ellipse
    Vec3 center{0, 0, 0};
    double radius = 1.0;
    double semi_minor = 0.7;
    Vec3 normal{0, 0, 1};
    int N = 16;
};

struct ExperimentConfig {
    std::string id;
    Section params;
};

struct RunConfig {
    std::string source;
    std::uint64_t seed = 1;
    int threads = 0;
    std::string output = "out";
    FieldConfig field;
    LoopConfig loop;
    OperatorParams op;
    QuadratureConfig quad;
    std::vector<ExperimentConfig> experiments;
    std::string echo;  // canonical dump of the parsed document
};

RunConfig load_config(const std::string& path);
RunConfig parse_config(const std::string& text, const std::string& source = "<string>");

AnalyticField make_field(const FieldConfig& f, double nu);
SampledCurve make_curve(const LoopConfig& l);
PolygonalLoop make_loop(const LoopConfig& l, int N);

}  // namespace looplab
