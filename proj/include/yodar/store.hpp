#pragma once

#include <string>
#include <vector>

#include "yodar/gbm.hpp"
#include "yodar/radarnet.hpp"
#include "yodar/synth.hpp"

namespace yodar {

// First line of every artifact file. Loaders reject unknown schema names and
// versions newer than they understand.
struct ArtifactHeader {
    std::string schema_name;
    int schema_version = 1;
    std::string digest;  // hex digest of the producing seed/config
};

inline constexpr int kWorldSchemaVersion = 1;
inline constexpr int kWeightsSchemaVersion = 1;
inline constexpr int kEnsembleSchemaVersion = 1;

std::string config_digest(const std::string& text);

void save_world(const std::vector<Scene>& scenes, const std::string& path,
                const std::string& digest);
std::vector<Scene> load_world(const std::string& path);

void save_weights(const RadarNet& net, const std::string& path, const std::string& digest);
// Reconstructs the network from the stored config; round-trips bit-exactly.
RadarNet load_weights(const std::string& path);

void save_ensemble(const Ensemble& e, const std::string& path, const std::string& digest);
Ensemble load_ensemble(const std::string& path);

// Delimited-text helpers; numbers are printed with up to 17 significant
// digits so parsing them back is bit-exact.
std::string format_double(double v);
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace yodar
