#include "aot/measure_io.hpp"

#include "aot/errors.hpp"

#include <fstream>

namespace aot {

using nlohmann::ordered_json;

PathMeasure measure_from_json(const ordered_json& j, const std::string& origin) {
    auto need = [&](const char* field) -> const ordered_json& {
        if (!j.contains(field))
            throw ValidationError("invalid-measure: " + origin + ": missing field \"" +
                                  field + "\"");
        return j.at(field);
    };
    const auto& jd = need("d");
    const auto& jT = need("T");
    const auto& ja = need("atoms");
    if (!jd.is_number_integer() || !jT.is_number_integer())
        throw ValidationError("invalid-measure: " + origin + ": d and T must be integers");
    if (!ja.is_array())
        throw ValidationError("invalid-measure: " + origin + ": \"atoms\" must be an array");
    int d = jd.get<int>();
    int T = jT.get<int>();
    std::vector<Atom> atoms;
    atoms.reserve(ja.size());
    std::size_t idx = 0;
    for (const auto& je : ja) {
        std::string where = origin + ": atoms[" + std::to_string(idx) + "]";
        if (!je.is_object() || !je.contains("path") || !je.contains("weight"))
            throw ValidationError("invalid-measure: " + where +
                                  ": expected object with \"path\" and \"weight\"");
        const auto& jp = je.at("path");
        if (!jp.is_array() || jp.size() != static_cast<std::size_t>(T))
            throw ValidationError("invalid-measure: " + where + ": \"path\" must have T=" +
                                  std::to_string(T) + " rows");
        Atom a;
        a.path.reserve(static_cast<std::size_t>(d) * T);
        for (const auto& row : jp) {
            if (!row.is_array() || row.size() != static_cast<std::size_t>(d))
                throw ValidationError("invalid-measure: " + where +
                                      ": each path row must have d=" + std::to_string(d) +
                                      " entries");
            for (const auto& v : row) {
                if (!v.is_number())
                    throw ValidationError("invalid-measure: " + where +
                                          ": non-numeric path entry");
                a.path.push_back(v.get<double>());
            }
        }
        if (!je.at("weight").is_number())
            throw ValidationError("invalid-measure: " + where + ": non-numeric weight");
        a.weight = je.at("weight").get<double>();
        atoms.push_back(std::move(a));
        ++idx;
    }
    try {
        return PathMeasure(d, T, std::move(atoms));
    } catch (const ValidationError& e) {
        throw ValidationError(std::string(e.what()) + " [" + origin + "]");
    }
}

PathMeasure load_measure(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ValidationError("invalid-json: cannot open " + path);
    ordered_json j;
    try {
        j = ordered_json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError("invalid-json: " + path + ": " + e.what() + " (byte " +
                              std::to_string(e.byte) + ")");
    }
    return measure_from_json(j, path);
}

ordered_json measure_to_json(const PathMeasure& mu) {
    ordered_json j;
    j["d"] = mu.d();
    j["T"] = mu.T();
    ordered_json atoms = ordered_json::array();
    for (const auto& a : mu.atoms()) {
        ordered_json rows = ordered_json::array();
        for (int t = 0; t < mu.T(); ++t) {
            ordered_json row = ordered_json::array();
            for (int c = 0; c < mu.d(); ++c)
                row.push_back(a.path[static_cast<std::size_t>(t) * mu.d() + c]);
            rows.push_back(std::move(row));
        }
        atoms.push_back({{"path", std::move(rows)}, {"weight", a.weight}});
    }
    j["atoms"] = std::move(atoms);
    return j;
}

void save_measure(const PathMeasure& mu, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw ValidationError("invalid-json: cannot write " + path);
    out << measure_to_json(mu).dump(2) << "\n";
}

} // namespace aot
