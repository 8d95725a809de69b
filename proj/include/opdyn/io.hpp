#pragma once

// Serialization: JSON records for paths, coded points and reports, the
// comment header that embeds a run configuration into output files, and the
// measure-spec mini language used by the classifier command.

#include <json.hpp>

#include <map>
#include <memory>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "opdyn/coding.hpp"
#include "opdyn/entropy.hpp"
#include "opdyn/graph_op.hpp"
#include "opdyn/measures.hpp"
#include "opdyn/oracle.hpp"

namespace opdyn {

using Json = nlohmann::ordered_json;

inline std::string version()
{
#ifdef OPDYN_VERSION
    return OPDYN_VERSION;
#else
    return "unknown";
#endif
}

inline Json to_json(const PathPrefix& x)
{
    return Json{{"depth", x.depth()}, {"label", x.top().to_hex()}, {"alpha", x.edges().to_string()}};
}

inline PathPrefix path_from_json(const Json& j)
{
    try {
        const int depth = j.at("depth").get<int>();
        const auto alpha = DigitSeq::parse(j.at("alpha").get<std::string>());
        if (alpha.size() != static_cast<std::size_t>(depth))
            throw DomainError("alpha length differs from depth");
        return PathPrefix(Config::from_hex(depth, j.at("label").get<std::string>()), alpha);
    } catch (const nlohmann::json::exception& e) {
        throw DomainError(std::string("malformed path record: ") + e.what());
    }
}

inline Json to_json(const CodedPoint& p)
{
    return Json{{"N", p.N()}, {"M", p.M()}, {"w", p.w.to_hex()}, {"alpha", p.alpha.to_string()}};
}

inline CodedPoint coded_from_json(const Json& j)
{
    try {
        const auto alpha = DigitSeq::parse(j.at("alpha").get<std::string>());
        if (alpha.size() != j.at("M").get<std::size_t>())
            throw DomainError("alpha length differs from M");
        return CodedPoint{Config::from_hex(j.at("N").get<int>(), j.at("w").get<std::string>()), alpha};
    } catch (const nlohmann::json::exception& e) {
        throw DomainError(std::string("malformed coded point record: ") + e.what());
    }
}

inline Json to_json(const ClassifierReport& r)
{
    Json j{{"verdict", r.verdict()}, {"type", nullptr}, {"k_max", r.k_max}, {"tol", r.tol}, {"seed", r.seed},
           {"tv_ladder", r.tv_ladder}, {"acceptance", r.acceptance}};
    if (r.type)
        j["type"] = *r.type;
    return j;
}

inline Json to_json(const CompareReport& r)
{
    Json gaps = Json::array();
    for (double g : r.gaps)
        gaps.push_back(std::isfinite(g) ? Json(g) : Json(nullptr));
    return Json{{"pass", r.pass}, {"spread", r.spread}, {"drift", r.drift}, {"reason", r.reason}, {"gaps", gaps}};
}

inline Json to_json(const CheckResult& r)
{
    return Json{{"check", r.name}, {"pass", r.pass}, {"detail", r.detail}};
}

/// Ordered key/value record of a run's parameters.
using RunConfig = std::vector<std::pair<std::string, std::string>>;

/// Comment lines "# key = value" preceded by the tool version.
inline void write_config_header(std::ostream& os, const RunConfig& cfg)
{
    os << "# opdyn " << version() << '\n';
    for (const auto& [k, v] : cfg)
        os << "# " << k << " = " << v << '\n';
}

inline Json config_json(const RunConfig& cfg)
{
    Json j = Json::object();
    for (const auto& [k, v] : cfg)
        j[k] = v;
    return j;
}

/// Reads the header written by write_config_header back into a map.
inline std::map<std::string, std::string> read_config_header(std::istream& is)
{
    std::map<std::string, std::string> out;
    std::string line;
    while (is.peek() == '#' && std::getline(is, line)) {
        const auto eq = line.find(" = ");
        if (eq != std::string::npos)
            out[line.substr(2, eq - 2)] = line.substr(eq + 3);
        else if (line.rfind("# opdyn ", 0) == 0)
            out["version"] = line.substr(8);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Measure specs

struct SamplerWindow {
    std::int64_t lo = 0;
    std::int64_t hi = 16;
    int M = 8;
};

namespace detail {

inline std::map<std::string, std::string> spec_options(const std::vector<std::string>& words, std::size_t from)
{
    std::map<std::string, std::string> kv;
    for (std::size_t i = from; i < words.size(); ++i) {
        const auto eq = words[i].find('=');
        if (eq == std::string::npos)
            kv[words[i]] = "";
        else
            kv[words[i].substr(0, eq)] = words[i].substr(eq + 1);
    }
    return kv;
}

inline std::vector<std::int64_t> parse_int_list(const std::string& s)
{
    std::vector<std::int64_t> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        out.push_back(std::stoll(item));
    return out;
}

} // namespace detail

/// Builds a sampler from a textual spec:
///   "product bernoulli <p>"
///   "periodic k=<k> period8"            (the orbit of 00010111 at phases 0, 4)
///   "periodic k=<k> word=<bits> phases=<a,b,...>"
///   "aperiodic toeplitz alpha=<digits>"
inline std::shared_ptr<const ZSampler> sampler_from_spec(const std::string& spec, const SamplerWindow& win = {})
{
    std::vector<std::string> words;
    {
        std::stringstream ss(spec);
        std::string w;
        while (ss >> w)
            words.push_back(w);
    }
    auto fail = [&](const std::string& why) { return DomainError("unknown measure spec '" + spec + "': " + why); };
    if (words.empty())
        throw fail("empty");
    try {
        if (words[0] == "product") {
            if (words.size() != 3 || words[1] != "bernoulli")
                throw fail("expected 'product bernoulli <p>'");
            return std::make_shared<ProductSampler>(std::make_shared<BernoulliBase>(std::stod(words[2])), win.lo, win.hi,
                                                    win.M);
        }
        if (words[0] == "periodic") {
            auto kv = detail::spec_options(words, 1);
            if (!kv.count("k"))
                throw fail("periodic spec needs k=<type>");
            std::string word = "00010111";
            std::vector<std::int64_t> phases{0, 4};
            if (!kv.count("period8")) {
                if (!kv.count("word") || !kv.count("phases"))
                    throw fail("periodic spec needs period8 or word=... phases=...");
                word = kv["word"];
                phases = detail::parse_int_list(kv["phases"]);
            }
            return std::make_shared<PeriodicTypeSampler>(std::make_shared<PeriodicOrbitBase>(word, phases),
                                                         std::stoi(kv["k"]), win.lo, win.hi, win.M);
        }
        if (words[0] == "aperiodic") {
            auto kv = detail::spec_options(words, 1);
            if (!kv.count("toeplitz"))
                throw fail("only the toeplitz base is supported");
            const auto alpha = DigitSeq::parse(kv.count("alpha") ? kv["alpha"] : "0");
            return make_aperiodic(std::make_shared<ToeplitzBase>(), std::make_shared<ToeplitzEigen>(8), alpha, win.lo,
                                  win.hi, win.M);
        }
    } catch (const std::invalid_argument& e) {
        if (dynamic_cast<const DomainError*>(&e))
            throw;
        throw fail(e.what());
    } catch (const std::out_of_range& e) {
        throw fail(e.what());
    }
    throw fail("unknown family '" + words[0] + "'");
}

} // namespace opdyn
