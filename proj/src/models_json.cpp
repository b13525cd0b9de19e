#include "pwl/models_json.hpp"

namespace pwl {

using nlohmann::json;

PwlSystem system_from_json(const json& j) {
    if (!j.contains("kind")) throw Error("model descriptor lacks a kind");
    const SystemKind kind = system_kind_from_name(j.at("kind").get<std::string>());
    switch (kind) {
        case SystemKind::TwoRegion: {
            TwoRegionModel m;
            m.m = j.at("m").get<double>();
            m.k = j.at("k").get<double>();
            m.epsilon = j.at("epsilon").get<double>();
            return build_two_region(m);
        }
        case SystemKind::ThreeRegion:
            return build_three_region(ThreeRegionParams::from_boundaries(
                j.at("rho").get<double>(), j.at("mu").get<double>(),
                j.at("m").get<double>(), j.at("k").get<double>(),
                j.at("epsilon").get<double>()));
        case SystemKind::Buffer: {
            BufferModel m{j.at("a").get<double>(), j.at("m").get<double>(),
                          j.at("k").get<double>(), j.at("epsilon").get<double>()};
            return build_buffer(m);
        }
        case SystemKind::Dk: {
            DkModel m;
            m.a = j.value("a", 0.8);
            m.eta = j.value("eta", 0.5);
            m.b = j.value("b", 0.5);
            m.I = j.at("I").get<double>();
            m.epsilon = j.at("epsilon").get<double>();
            return build_dk(m);
        }
        case SystemKind::ModifiedDk: {
            ModifiedDkModel m;
            m.a = j.value("a", 0.8);
            m.eta = j.value("eta", 0.5);
            m.b = j.value("b", 0.5);
            m.I = j.at("I").get<double>();
            m.epsilon = j.at("epsilon").get<double>();
            m.s = j.at("s").get<double>();
            m.rho = j.at("rho").get<double>();
            if (j.contains("eta1")) m.eta1 = j.at("eta1").get<double>();
            return build_modified_dk(m);
        }
    }
    throw Error("unreachable model kind");
}

json system_to_json(const PwlSystem& sys) {
    const ModelInfo info = extract_info(sys);
    json j;
    j["kind"] = system_kind_name(sys.kind);
    j["epsilon"] = sys.epsilon;
    switch (sys.kind) {
        case SystemKind::TwoRegion:
            j["m"] = info.m;
            j["k"] = info.k;
            break;
        case SystemKind::ThreeRegion:
            j["rho"] = info.rho;
            j["mu"] = info.mu;
            j["m"] = info.m;
            j["k"] = info.k;
            break;
        case SystemKind::Buffer:
            j["a"] = info.a;
            j["m"] = info.m;
            j["k"] = info.k;
            break;
        case SystemKind::Dk:
            j["a"] = info.a;
            j["eta"] = info.eta;
            j["b"] = info.b;
            j["I"] = info.I;
            break;
        case SystemKind::ModifiedDk:
            j["a"] = info.a;
            j["eta"] = info.eta;
            j["b"] = info.b;
            j["I"] = info.I;
            j["s"] = info.s;
            j["rho"] = info.rho;
            break;
    }
    return j;
}

}  // namespace pwl
