#include "fmuad/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

namespace fmuad {

namespace {

constexpr char kMagic[4] = {'F', 'M', 'U', 'D'};

// Serialization assumes a little-endian host (checked at load/save time).
bool host_is_little_endian() {
    const uint32_t probe = 1;
    unsigned char b;
    std::memcpy(&b, &probe, 1);
    return b == 1;
}

class Writer {
public:
    void u32(uint32_t v) { raw(&v, sizeof v); }
    void u64(uint64_t v) { raw(&v, sizeof v); }
    void f64(double v) { raw(&v, sizeof v); }
    void str(const std::string& s) {
        u32(static_cast<uint32_t>(s.size()));
        raw(s.data(), s.size());
    }
    void raw(const void* p, size_t n) {
        const char* c = static_cast<const char*>(p);
        buf_.insert(buf_.end(), c, c + n);
    }
    const std::string& buffer() const { return buf_; }

private:
    std::string buf_;
};

class Reader {
public:
    Reader(std::string data, std::string path) : data_(std::move(data)), path_(std::move(path)) {}

    uint32_t u32() { return get<uint32_t>(); }
    uint64_t u64() { return get<uint64_t>(); }
    double f64() { return get<double>(); }
    std::string str() {
        uint32_t n = u32();
        need(n);
        std::string s = data_.substr(pos_, n);
        pos_ += n;
        return s;
    }
    size_t pos() const { return pos_; }
    const std::string& data() const { return data_; }

    void fail(const std::string& why) const { throw ParseError(path_ + ": " + why); }

private:
    template <typename T>
    T get() {
        need(sizeof(T));
        T v;
        std::memcpy(&v, data_.data() + pos_, sizeof(T));
        pos_ += sizeof(T);
        return v;
    }
    void need(size_t n) {
        if (pos_ + n > data_.size()) fail("truncated checkpoint");
    }

    std::string data_;
    std::string path_;
    size_t pos_ = 0;
};

uint64_t fnv1a(const char* data, size_t n) {
    uint64_t h = 0xCBF29CE484222325ULL;
    for (size_t i = 0; i < n; ++i) {
        h ^= static_cast<unsigned char>(data[i]);
        h *= 0x100000001B3ULL;
    }
    return h;
}

std::map<std::string, double> config_table(const ModelConfig& cfg) {
    std::map<std::string, double> t;
    t["m"] = cfg.m;
    t["tau"] = cfg.tau;
    t["k"] = cfg.k;
    t["stride"] = cfg.stride;
    t["hidden_ch"] = cfg.hidden_ch;
    t["n_layers"] = static_cast<double>(cfg.channels.size());
    for (size_t i = 0; i < cfg.channels.size(); ++i) {
        t["channel_" + std::to_string(i)] = cfg.channels[i];
        t["dilation_" + std::to_string(i)] = cfg.dilations[i];
    }
    t["use_correlation"] = cfg.use_correlation ? 1.0 : 0.0;
    t["use_temporal"] = cfg.use_temporal ? 1.0 : 0.0;
    t["use_spatial"] = cfg.use_spatial ? 1.0 : 0.0;
    return t;
}

ModelConfig config_from_table(const std::map<std::string, double>& t, Reader& r) {
    auto get = [&](const std::string& key) {
        auto it = t.find(key);
        if (it == t.end()) r.fail("missing hyperparameter '" + key + "'");
        return it->second;
    };
    ModelConfig cfg;
    cfg.m = static_cast<int>(get("m"));
    cfg.tau = static_cast<int>(get("tau"));
    cfg.k = static_cast<int>(get("k"));
    cfg.stride = static_cast<int>(get("stride"));
    cfg.hidden_ch = static_cast<int>(get("hidden_ch"));
    int n_layers = static_cast<int>(get("n_layers"));
    cfg.channels.clear();
    cfg.dilations.clear();
    for (int i = 0; i < n_layers; ++i) {
        cfg.channels.push_back(static_cast<int>(get("channel_" + std::to_string(i))));
        cfg.dilations.push_back(static_cast<int>(get("dilation_" + std::to_string(i))));
    }
    cfg.use_correlation = get("use_correlation") != 0.0;
    cfg.use_temporal = get("use_temporal") != 0.0;
    cfg.use_spatial = get("use_spatial") != 0.0;
    return cfg;
}

}  // namespace

void save_checkpoint(Model& model, const NormStats& stats, const std::string& path) {
    if (!host_is_little_endian())
        throw ContractError("checkpoint format requires a little-endian host");

    Writer w;
    w.raw(kMagic, 4);
    w.u32(Checkpoint::kVersion);

    auto table = config_table(model.config());
    w.u32(static_cast<uint32_t>(table.size()));
    for (const auto& [key, value] : table) {
        w.str(key);
        w.f64(value);
    }
    w.u64(model.seed());

    w.u32(static_cast<uint32_t>(stats.min.size()));
    for (double v : stats.min) w.f64(v);
    for (double v : stats.max) w.f64(v);

    auto params = model.all_params();
    w.u32(static_cast<uint32_t>(params.size()));
    for (Param* p : params) {
        w.str(p->name);
        w.u32(static_cast<uint32_t>(p->value.shape.size()));
        for (int d : p->value.shape) w.u32(static_cast<uint32_t>(d));
        for (double v : p->value.data) w.f64(v);
    }

    uint64_t checksum = fnv1a(w.buffer().data(), w.buffer().size());

    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError(path + ": cannot open file for writing");
    out.write(w.buffer().data(), static_cast<std::streamsize>(w.buffer().size()));
    out.write(reinterpret_cast<const char*>(&checksum), sizeof checksum);
    if (!out) throw ParseError(path + ": write failed");
}

LoadedModel load_checkpoint(const std::string& path) {
    if (!host_is_little_endian())
        throw ContractError("checkpoint format requires a little-endian host");

    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(path + ": cannot open file");
    std::ostringstream ss;
    ss << in.rdbuf();
    std::string bytes = ss.str();
    if (bytes.size() < 4 + sizeof(uint32_t) + sizeof(uint64_t))
        throw ParseError(path + ": truncated checkpoint");

    uint64_t stored_checksum;
    std::memcpy(&stored_checksum, bytes.data() + bytes.size() - sizeof(uint64_t), sizeof(uint64_t));
    const size_t body_len = bytes.size() - sizeof(uint64_t);
    if (fnv1a(bytes.data(), body_len) != stored_checksum)
        throw ParseError(path + ": checksum mismatch, file is corrupt");

    Reader r(bytes.substr(0, body_len), path);
    char magic[4];
    std::memcpy(magic, r.data().data(), 4);
    if (std::memcmp(magic, kMagic, 4) != 0) r.fail("bad magic bytes, not a checkpoint file");
    Reader body(bytes.substr(4, body_len - 4), path);

    uint32_t version = body.u32();
    if (version != Checkpoint::kVersion)
        body.fail("unsupported format version " + std::to_string(version));

    uint32_t nkeys = body.u32();
    std::map<std::string, double> table;
    for (uint32_t i = 0; i < nkeys; ++i) {
        std::string key = body.str();
        table[key] = body.f64();
    }
    ModelConfig cfg = config_from_table(table, body);
    uint64_t seed = body.u64();

    LoadedModel result;
    uint32_t m_stats = body.u32();
    result.stats.min.resize(m_stats);
    result.stats.max.resize(m_stats);
    for (auto& v : result.stats.min) v = body.f64();
    for (auto& v : result.stats.max) v = body.f64();

    result.model = std::make_unique<Model>(cfg, seed);
    auto params = result.model->all_params();
    std::map<std::string, Param*> by_name;
    for (Param* p : params) by_name[p->name] = p;

    uint32_t ntensors = body.u32();
    if (ntensors != params.size())
        body.fail("checkpoint holds " + std::to_string(ntensors) + " tensors, model expects " +
                  std::to_string(params.size()));
    for (uint32_t i = 0; i < ntensors; ++i) {
        std::string name = body.str();
        auto it = by_name.find(name);
        if (it == by_name.end()) body.fail("unknown parameter tensor '" + name + "'");
        Param* p = it->second;
        uint32_t rank = body.u32();
        std::vector<int> shape(rank);
        for (auto& d : shape) d = static_cast<int>(body.u32());
        if (shape != p->value.shape)
            body.fail("parameter '" + name + "' has shape " + shape_str(shape) + ", expected " +
                      shape_str(p->value.shape));
        for (auto& v : p->value.data) v = body.f64();
    }
    return result;
}

}  // namespace fmuad
