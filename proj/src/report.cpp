#include "msa/report.hpp"

#include <cstdio>
#include <sstream>

#include <nlohmann/json.hpp>

#include "msa/errors.hpp"

namespace msa {

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmt9(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    out.reserve(s.size() + 2);
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof(buf), "\\u%04x", c);
                    out += buf;
                } else {
                    out += c;
                }
        }
    }
    return out;
}

/* Minimal JSON writer so numeric output stays under explicit %.17g control. */
class JsonWriter {
  public:
    void key(const std::string& k) {
        comma();
        out_ << indent_ << '"' << escape(k) << "\": ";
        pending_ = false;
    }
    void value_str(const std::string& v) {
        out_ << '"' << escape(v) << '"';
        pending_ = true;
    }
    void value_num(double v) {
        out_ << fmt17(v);
        pending_ = true;
    }
    void value_int(long long v) {
        out_ << v;
        pending_ = true;
    }
    void value_bool(bool v) {
        out_ << (v ? "true" : "false");
        pending_ = true;
    }
    void value_null() {
        out_ << "null";
        pending_ = true;
    }
    void value_num_array(const std::vector<double>& vs) {
        out_ << '[';
        for (std::size_t i = 0; i < vs.size(); ++i)
            out_ << (i ? "," : "") << fmt17(vs[i]);
        out_ << ']';
        pending_ = true;
    }
    void open_object() {
        out_ << "{\n";
        indent_ += "  ";
        pending_ = false;
    }
    void close_object() {
        indent_.resize(indent_.size() - 2);
        out_ << '\n' << indent_ << '}';
        pending_ = true;
    }
    void open_array() {
        out_ << "[\n";
        indent_ += "  ";
        pending_ = false;
    }
    void close_array() {
        indent_.resize(indent_.size() - 2);
        out_ << '\n' << indent_ << ']';
        pending_ = true;
    }
    void array_item() {
        comma();
        out_ << indent_;
        pending_ = false;
    }
    std::string str() const { return out_.str(); }

  private:
    void comma() {
        if (pending_) out_ << ",\n";
    }
    std::ostringstream out_;
    std::string indent_;
    bool pending_ = false;
};

}  // namespace

RunReport make_report(const Scenario& scenario, const SolverConfig& config,
                      const SolveResult& result, const BalanceReport& balance) {
    RunReport r;
    r.scenario = scenario.name;
    r.model = scenario.model == Model::regression ? "R" : "P";
    r.seed = config.seed;
    r.eta = config.eta;
    r.eta_prime = config.eta_prime;
    r.outer_max_iters = config.outer_max_iters;
    r.outer_tol = config.outer_tol;
    r.inner_max_iters = config.inner_max_iters;
    r.inner_tol = config.inner_tol;
    r.restarts = config.restarts;
    if (config.z0) {
        std::string z0;
        for (std::size_t i = 0; i < config.z0->size(); ++i)
            z0 += (i ? "," : "") + fmt17((*config.z0)[i]);
        r.z0 = z0;
    }
    r.z_star = result.z_star.weights();
    r.gamma_star = result.gamma_star;
    r.certificate = certificate_name(result.certificate);
    r.balance_slacks = balance.slacks;
    r.balance_max_slack = balance.max_slack;
    r.balance_pass = balance.pass;
    r.epsilon = scenario.epsilon();
    r.M = scenario.loss.M;
    r.delta = 2.0 * config.eta * scenario.loss.M;
    r.mixture_loss_bound = r.epsilon + config.eta * scenario.loss.M + config.eta_prime;
    r.trace = result.trace.iterations;
    return r;
}

std::string report_to_json(const RunReport& report) {
    JsonWriter w;
    w.open_object();
    w.key("scenario");
    w.value_str(report.scenario);
    w.key("model");
    w.value_str(report.model);
    w.key("seed");
    w.value_int(static_cast<long long>(report.seed));

    w.key("config");
    w.open_object();
    w.key("eta");
    w.value_num(report.eta);
    w.key("eta_prime");
    w.value_num(report.eta_prime);
    w.key("outer_max_iters");
    w.value_int(static_cast<long long>(report.outer_max_iters));
    w.key("outer_tol");
    w.value_num(report.outer_tol);
    w.key("inner_max_iters");
    w.value_int(static_cast<long long>(report.inner_max_iters));
    w.key("inner_tol");
    w.value_num(report.inner_tol);
    w.key("restarts");
    w.value_int(static_cast<long long>(report.restarts));
    w.key("z0");
    w.value_str(report.z0);
    w.close_object();

    w.key("z_star");
    w.value_num_array(report.z_star);
    w.key("gamma_star");
    w.value_num(report.gamma_star);
    w.key("certificate");
    w.value_str(report.certificate);

    w.key("balance");
    w.open_object();
    w.key("slacks");
    w.value_num_array(report.balance_slacks);
    w.key("max_slack");
    w.value_num(report.balance_max_slack);
    w.key("pass");
    w.value_bool(report.balance_pass);
    w.close_object();

    w.key("guarantee");
    w.open_object();
    w.key("epsilon");
    w.value_num(report.epsilon);
    w.key("M");
    w.value_num(report.M);
    w.key("delta");
    w.value_num(report.delta);
    w.key("mixture_loss_bound");
    w.value_num(report.mixture_loss_bound);
    w.close_object();

    w.key("iterations");
    w.open_array();
    for (const auto& it : report.trace) {
        w.array_item();
        w.open_object();
        w.key("iter");
        w.value_int(static_cast<long long>(it.iter));
        w.key("gamma");
        w.value_num(it.gamma);
        w.key("z");
        w.value_num_array(it.z);
        w.key("losses");
        w.value_num_array(it.losses);
        w.key("majorization_touch_error");
        w.value_num(it.majorization_touch_error);
        w.key("majorization_gap");
        w.value_num(it.majorization_gap);
        w.close_object();
    }
    w.close_array();

    w.key("sweep");
    if (report.sweep) {
        w.open_object();
        w.key("header");
        w.open_array();
        for (const auto& h : report.sweep->header) {
            w.array_item();
            w.value_str(h);
        }
        w.close_array();
        w.key("rows");
        w.open_array();
        auto write_row = [&](const SweepRow& row) {
            w.array_item();
            w.open_object();
            w.key("target");
            w.value_str(row.target);
            w.key("lambda");
            w.value_num_array(row.lambda);
            w.key("dw");
            w.value_num(row.dw);
            w.key("unif");
            w.value_num(row.unif);
            w.key("per_source");
            w.value_num_array(row.per_source);
            w.key("best_convex");
            w.value_num(row.best_convex);
            w.close_object();
        };
        for (const auto& row : report.sweep->rows) write_row(row);
        write_row(report.sweep->worst);
        w.close_array();
        w.close_object();
    } else {
        w.value_null();
    }
    w.close_object();
    return w.str() + "\n";
}

RunReport report_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument(std::string("report is not valid JSON: ") + e.what());
    }
    try {
        RunReport r;
        r.scenario = j.at("scenario").get<std::string>();
        r.model = j.at("model").get<std::string>();
        r.seed = j.at("seed").get<std::uint64_t>();
        const auto& c = j.at("config");
        r.eta = c.at("eta").get<double>();
        r.eta_prime = c.at("eta_prime").get<double>();
        r.outer_max_iters = c.at("outer_max_iters").get<std::size_t>();
        r.outer_tol = c.at("outer_tol").get<double>();
        r.inner_max_iters = c.at("inner_max_iters").get<std::size_t>();
        r.inner_tol = c.at("inner_tol").get<double>();
        r.restarts = c.at("restarts").get<std::size_t>();
        r.z0 = c.at("z0").get<std::string>();
        r.z_star = j.at("z_star").get<std::vector<double>>();
        r.gamma_star = j.at("gamma_star").get<double>();
        r.certificate = j.at("certificate").get<std::string>();
        r.balance_slacks = j.at("balance").at("slacks").get<std::vector<double>>();
        r.balance_max_slack = j.at("balance").at("max_slack").get<double>();
        r.balance_pass = j.at("balance").at("pass").get<bool>();
        r.epsilon = j.at("guarantee").at("epsilon").get<double>();
        r.M = j.at("guarantee").at("M").get<double>();
        r.delta = j.at("guarantee").at("delta").get<double>();
        r.mixture_loss_bound = j.at("guarantee").at("mixture_loss_bound").get<double>();
        for (const auto& it : j.at("iterations")) {
            IterRecord rec;
            rec.iter = it.at("iter").get<std::size_t>();
            rec.gamma = it.at("gamma").get<double>();
            rec.z = it.at("z").get<std::vector<double>>();
            rec.losses = it.at("losses").get<std::vector<double>>();
            rec.majorization_touch_error = it.at("majorization_touch_error").get<double>();
            rec.majorization_gap = it.at("majorization_gap").get<double>();
            r.trace.push_back(std::move(rec));
        }
        if (!j.at("sweep").is_null()) {
            SweepTable table;
            for (const auto& h : j["sweep"].at("header"))
                table.header.push_back(h.get<std::string>());
            std::vector<SweepRow> rows;
            for (const auto& row : j["sweep"].at("rows")) {
                SweepRow sr;
                sr.target = row.at("target").get<std::string>();
                sr.lambda = row.at("lambda").get<std::vector<double>>();
                sr.dw = row.at("dw").get<double>();
                sr.unif = row.at("unif").get<double>();
                sr.per_source = row.at("per_source").get<std::vector<double>>();
                sr.best_convex = row.at("best_convex").get<double>();
                rows.push_back(std::move(sr));
            }
            if (rows.empty()) throw InvalidArgument("sweep table has no rows");
            table.worst = rows.back();
            rows.pop_back();
            table.rows = std::move(rows);
            r.sweep = std::move(table);
        }
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument(std::string("report is malformed: ") + e.what());
    }
}

std::string trace_to_csv(const std::vector<IterRecord>& trace) {
    std::ostringstream out;
    out << "iter,gamma";
    const std::size_t p = trace.empty() ? 0 : trace.front().losses.size();
    for (std::size_t k = 1; k <= p; ++k) out << ",loss_" << k;
    out << '\n';
    for (const auto& it : trace) {
        out << it.iter << ',' << fmt9(it.gamma);
        for (double loss : it.losses) out << ',' << fmt9(loss);
        out << '\n';
    }
    return out.str();
}

std::string sweep_to_csv(const SweepTable& table) {
    std::ostringstream out;
    for (std::size_t i = 0; i < table.header.size(); ++i)
        out << (i ? "," : "") << table.header[i];
    out << '\n';
    const auto write_row = [&](const SweepRow& row) {
        out << row.target << ',';
        for (std::size_t i = 0; i < row.lambda.size(); ++i)
            out << (i ? ";" : "") << fmt9(row.lambda[i]);
        out << ',' << fmt9(row.dw) << ',' << fmt9(row.unif);
        for (double v : row.per_source) out << ',' << fmt9(v);
        out << ',' << fmt9(row.best_convex) << '\n';
    };
    for (const auto& row : table.rows) write_row(row);
    write_row(table.worst);
    return out.str();
}

}  // namespace msa
