#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "hran/errors.hpp"
#include "hran/nn.hpp"

namespace hran {

using json = nlohmann::ordered_json;

void save_checkpoint(const std::string& path, const ModelParams& params) {
    json doc;
    doc["format_version"] = 1;
    doc["dims"] = {{"feature_dim", params.dims.feature_dim},
                   {"hidden_sub", params.dims.hidden_sub},
                   {"hidden_turn", params.dims.hidden_turn}};
    doc["flags"] = {{"use_sub_attention", params.flags.use_sub_attention},
                    {"use_turn_attention", params.flags.use_turn_attention}};
    json tensors;
    visit_tensors(const_cast<ModelParams&>(params),
                  [&tensors, &path](const std::string& name, const Vec& v) {
                      for (double x : v) {
                          if (!std::isfinite(x)) {
                              throw validation_error("checkpoint " + path +
                                                     ": non-finite value in " + name);
                          }
                      }
                      tensors[name] = v;
                  });
    doc["tensors"] = std::move(tensors);

    const std::string tmp = path + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw io_error("cannot write checkpoint: " + path);
        f << doc.dump();
        if (!f) throw io_error("write failed: " + path);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        throw io_error("cannot rename into place: " + path);
    }
}

ModelParams load_checkpoint(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw io_error("cannot open checkpoint: " + path);
    json doc;
    try {
        f >> doc;
    } catch (const json::exception& e) {
        throw validation_error("checkpoint " + path + ": malformed: " + e.what());
    }
    try {
        if (doc.at("format_version").get<int>() != 1) {
            throw validation_error("checkpoint " + path + ": unsupported format_version");
        }
        ModelDims dims;
        dims.feature_dim = doc.at("dims").at("feature_dim").get<size_t>();
        dims.hidden_sub = doc.at("dims").at("hidden_sub").get<size_t>();
        dims.hidden_turn = doc.at("dims").at("hidden_turn").get<size_t>();
        ModelFlags flags;
        flags.use_sub_attention = doc.at("flags").at("use_sub_attention").get<bool>();
        flags.use_turn_attention = doc.at("flags").at("use_turn_attention").get<bool>();

        ModelParams params = make_params(dims, flags);
        const json& tensors = doc.at("tensors");
        visit_tensors(params, [&tensors, &path](const std::string& name, Vec& v) {
            if (!tensors.contains(name)) {
                throw validation_error("checkpoint " + path + ": missing tensor " + name);
            }
            Vec loaded = tensors.at(name).get<Vec>();
            if (loaded.size() != v.size()) {
                throw validation_error("checkpoint " + path + ": tensor " + name +
                                       " has wrong size");
            }
            for (double x : loaded) {
                if (!std::isfinite(x)) {
                    throw validation_error("checkpoint " + path +
                                           ": non-finite value in " + name);
                }
            }
            v = std::move(loaded);
        });
        return params;
    } catch (const json::exception& e) {
        throw validation_error("checkpoint " + path + ": malformed: " + e.what());
    }
}

}  // namespace hran
