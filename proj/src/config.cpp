#include "config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

namespace cipherlab {

namespace {

std::int64_t parse_int(const std::string& key, const std::string& value) {
    std::int64_t out = 0;
    const auto* begin = value.data();
    const auto* end = value.data() + value.size();
    const auto res = std::from_chars(begin, end, out);
    if (res.ec != std::errc{} || res.ptr != end)
        throw ConfigError("config: key '" + key + "' wants an integer, got '" + value + "'");
    return out;
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const double out = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return out;
    } catch (const std::exception&) {
        throw ConfigError("config: key '" + key + "' wants a number, got '" + value + "'");
    }
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "1" || value == "true" || value == "on") return true;
    if (value == "0" || value == "false" || value == "off") return false;
    throw ConfigError("config: key '" + key + "' wants a boolean, got '" + value + "'");
}

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

struct KeyDef {
    const char* name;
    std::function<void(RunConfig&, const std::string&)> set;
    std::function<std::string(const RunConfig&)> get;
};

#define STR_KEY(field) \
    {#field, [](RunConfig& c, const std::string& v) { c.field = v; }, \
     [](const RunConfig& c) { return c.field; }}
#define INT_KEY(field) \
    {#field, [](RunConfig& c, const std::string& v) { c.field = parse_int(#field, v); }, \
     [](const RunConfig& c) { return std::to_string(c.field); }}
#define DBL_KEY(field) \
    {#field, [](RunConfig& c, const std::string& v) { c.field = parse_double(#field, v); }, \
     [](const RunConfig& c) { return fmt_double(c.field); }}
#define BOOL_KEY(field) \
    {#field, [](RunConfig& c, const std::string& v) { c.field = parse_bool(#field, v); }, \
     [](const RunConfig& c) { return std::string(c.field ? "1" : "0"); }}

const std::vector<KeyDef>& registry() {
    static const std::vector<KeyDef> defs = {
        STR_KEY(corpus),       STR_KEY(out_dir),      STR_KEY(cipher),
        STR_KEY(level),        INT_KEY(vocab_k),      INT_KEY(seq_len),
        INT_KEY(batch),        INT_KEY(steps),        INT_KEY(seed),
        INT_KEY(emb_dim),      STR_KEY(timing),       INT_KEY(timing_dim),
        INT_KEY(gen_fc),       INT_KEY(disc_fc),      INT_KEY(disc_layers),
        DBL_KEY(dropout),      DBL_KEY(lambda_cyc),   DBL_KEY(alpha_gp),
        BOOL_KEY(share_embeddings),                   DBL_KEY(init_scale),
        STR_KEY(gan_loss),     STR_KEY(emb_update),   DBL_KEY(lr),
        INT_KEY(warmup_steps),
        DBL_KEY(beta1),        DBL_KEY(beta2),        DBL_KEY(adam_eps),
        INT_KEY(checkpoint_every),                    DBL_KEY(target_acc),
        BOOL_KEY(resume),      BOOL_KEY(quiet),       INT_KEY(max_key_len),
        INT_KEY(eval_batches), INT_KEY(eval_seed),    STR_KEY(run_dir),
        STR_KEY(checkpoint),   STR_KEY(mapping),      STR_KEY(x_bank),
        STR_KEY(y_bank),       STR_KEY(regime),       INT_KEY(simplex_steps),
        DBL_KEY(eps_max),      INT_KEY(grid_res),     STR_KEY(plot_metrics),
        STR_KEY(plot_simplex),
    };
    return defs;
}

#undef STR_KEY
#undef INT_KEY
#undef DBL_KEY
#undef BOOL_KEY

const KeyDef& find_key(const std::string& key) {
    for (const auto& def : registry())
        if (key == def.name) return def;
    throw ConfigError("config: unknown key '" + key + "'");
}

} // namespace

void RunConfig::set(const std::string& key, const std::string& value) {
    find_key(key).set(*this, value);
}

std::string RunConfig::get(const std::string& key) const { return find_key(key).get(*this); }

std::vector<std::string> RunConfig::keys() {
    std::vector<std::string> out;
    for (const auto& def : registry()) out.push_back(def.name);
    return out;
}

void RunConfig::load_text(const std::string& text, const std::string& origin) {
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        // trim
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        const auto last = line.find_last_not_of(" \t\r");
        line = line.substr(first, last - first + 1);
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected key=value");
        auto strip = [](std::string s) {
            const auto a = s.find_first_not_of(" \t");
            if (a == std::string::npos) return std::string();
            const auto b = s.find_last_not_of(" \t");
            return s.substr(a, b - a + 1);
        };
        set(strip(line.substr(0, eq)), strip(line.substr(eq + 1)));
    }
}

void RunConfig::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    load_text(ss.str(), path);
}

std::string RunConfig::serialized() const {
    std::string out;
    for (const auto& def : registry()) {
        out += def.name;
        out += "=";
        out += def.get(*this);
        out += "\n";
    }
    return out;
}

GanConfig RunConfig::gan(std::size_t vocab) const {
    GanConfig g;
    g.vocab = vocab;
    g.seq_len = static_cast<std::size_t>(seq_len);
    g.batch = static_cast<std::size_t>(batch);
    g.emb_dim = static_cast<std::size_t>(emb_dim);
    g.timing_dim = static_cast<std::size_t>(timing_dim);
    g.timing = timing_mode_from(timing);
    g.gen_fc = static_cast<std::size_t>(gen_fc);
    g.disc_fc = static_cast<std::size_t>(disc_fc);
    g.disc_layers = static_cast<std::size_t>(disc_layers);
    g.dropout = dropout;
    g.lambda_cyc = lambda_cyc;
    g.alpha_gp = alpha_gp;
    g.share_embeddings = share_embeddings;
    g.init_scale = init_scale;
    if (gan_loss == "lsgan") g.loss = GanLoss::least_squares;
    else if (gan_loss == "log") g.loss = GanLoss::log_likelihood;
    else throw ConfigError("config: gan_loss must be 'lsgan' or 'log'");
    if (emb_update == "critic") g.emb_update = EmbeddingUpdate::critic;
    else if (emb_update == "generator") g.emb_update = EmbeddingUpdate::generator;
    else throw ConfigError("config: emb_update must be 'critic' or 'generator'");
    g.steps = steps;
    g.lr = lr;
    g.warmup_steps = warmup_steps;
    g.beta1 = beta1;
    g.beta2 = beta2;
    g.adam_eps = adam_eps;
    g.seed = static_cast<std::uint64_t>(seed);
    return g;
}

} // namespace cipherlab
