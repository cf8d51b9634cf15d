#include "fmuad/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "fmuad/data_io.hpp"

namespace fmuad {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(item);
    return out;
}

std::vector<int> parse_int_list(const std::string& s, const std::string& field) {
    std::vector<int> out;
    for (const auto& item : split(s, ',')) {
        try {
            out.push_back(std::stoi(item));
        } catch (const std::exception&) {
            throw ContractError("config field '" + field + "': bad integer '" + item + "'");
        }
    }
    return out;
}

}  // namespace

bool RunConfig::use_correlation() const {
    return detectors.find("correlation") != std::string::npos;
}
bool RunConfig::use_temporal() const { return detectors.find("temporal") != std::string::npos; }
bool RunConfig::use_spatial() const { return detectors.find("spatial") != std::string::npos; }

void RunConfig::validate() const {
    if (k % 2 != 0) throw ContractError("config field 'k': must be even, got " + std::to_string(k));
    if (k >= tau) throw ContractError("config field 'k': must be smaller than tau");
    if (tau < 2) throw ContractError("config field 'tau': must be >= 2");
    if (stride < 1) throw ContractError("config field 'stride': must be >= 1");
    if (batch_size < 2) throw ContractError("config field 'batch_size': must be >= 2");
    if (epochs < 1) throw ContractError("config field 'epochs': must be >= 1");
    if (warmup_epochs < 0) throw ContractError("config field 'warmup_epochs': must be >= 0");
    if (learning_rate <= 0.0) throw ContractError("config field 'learning_rate': must be positive");
    if (hidden_ch < 1) throw ContractError("config field 'hidden_ch': must be >= 1");
    if (channels.empty() || channels.size() != dilations.size())
        throw ContractError("config fields 'channels'/'dilations': must be nonempty and align");
    for (const auto& d : split(detectors, ','))
        if (d != "correlation" && d != "temporal" && d != "spatial")
            throw ContractError("config field 'detectors': unknown detector '" + d + "'");
    if (!use_correlation() && !use_temporal() && !use_spatial())
        throw ContractError("config field 'detectors': at least one detector must be enabled");
    if (loss_variant != "full" && loss_variant != "l1-only")
        throw ContractError("config field 'loss_variant': must be 'full' or 'l1-only', got '" +
                            loss_variant + "'");
}

ModelConfig RunConfig::model_config(int m) const {
    ModelConfig mc;
    mc.m = m;
    mc.tau = tau;
    mc.k = k;
    mc.stride = stride;
    mc.hidden_ch = hidden_ch;
    mc.channels = channels;
    mc.dilations = dilations;
    mc.use_correlation = use_correlation();
    mc.use_temporal = use_temporal();
    mc.use_spatial = use_spatial();
    return mc;
}

void apply_config_file(RunConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path + ": cannot open config file");
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        // trim
        auto notspace = [](unsigned char c) { return !std::isspace(c); };
        line.erase(line.begin(), std::find_if(line.begin(), line.end(), notspace));
        line.erase(std::find_if(line.rbegin(), line.rend(), notspace).base(), line.end());
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ParseError(path + ":" + std::to_string(lineno) + ": expected key=value");
        std::string key = line.substr(0, eq);
        std::string value = line.substr(eq + 1);

        try {
            if (key == "tau") cfg.tau = std::stoi(value);
            else if (key == "k") cfg.k = std::stoi(value);
            else if (key == "stride") cfg.stride = std::stoi(value);
            else if (key == "batch_size") cfg.batch_size = std::stoi(value);
            else if (key == "epochs") cfg.epochs = std::stoi(value);
            else if (key == "warmup_epochs") cfg.warmup_epochs = std::stoi(value);
            else if (key == "learning_rate") cfg.learning_rate = std::stod(value);
            else if (key == "hidden_ch") cfg.hidden_ch = std::stoi(value);
            else if (key == "channels") cfg.channels = parse_int_list(value, "channels");
            else if (key == "dilations") cfg.dilations = parse_int_list(value, "dilations");
            else if (key == "detectors") cfg.detectors = value;
            else if (key == "loss_variant") cfg.loss_variant = value;
            else if (key == "seed") cfg.seed = std::stoull(value);
            else if (key == "threads") cfg.threads = std::stoi(value);
            else
                throw ParseError(path + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
        } catch (const ParseError&) {
            throw;
        } catch (const ContractError&) {
            throw;
        } catch (const std::exception&) {
            throw ParseError(path + ":" + std::to_string(lineno) + ": bad value '" + value +
                             "' for key '" + key + "'");
        }
    }
}

}  // namespace fmuad
