#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "json.hpp"
#include "memeattr/ake.hpp"
#include "memeattr/cli.hpp"
#include "memeattr/errors.hpp"
#include "memeattr/eval.hpp"
#include "memeattr/index_store.hpp"
#include "memeattr/kb.hpp"
#include "memeattr/metrics.hpp"
#include "memeattr/mock_backend.hpp"
#include "memeattr/rir.hpp"
#include "memeattr/tokenizer.hpp"

namespace py = pybind11;
using namespace memeattr;

namespace {

// JSON crosses the boundary as text; the Python side decodes it.
std::string dump(const nlohmann::json& j) { return j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace); }

std::string query_index(const std::string& index_path, const std::string& text, std::size_t k, double w_bm25) {
    const auto index = text::load_index(index_path);
    model::MockBackend embedder;
    if (index.embedder != embedder.name()) throw IndexMismatch("index was embedded by " + index.embedder);
    const auto vec = embedder.embed_texts(std::vector<std::string>{text}, index.dense.dim()).front();
    const auto tokens = text::tokenize(text);
    nlohmann::json hits = nlohmann::json::array();
    for (const auto& h : text::top_k(index.bm25, index.dense, tokens, vec, {w_bm25, 1.0 - w_bm25}, k)) {
        hits.push_back({{"doc_id", h.doc_id},
                        {"term", index.entry(h.doc_id).term},
                        {"s_hybrid", h.s_hybrid},
                        {"s_bm25", h.s_bm25},
                        {"s_dense", h.s_dense}});
    }
    return dump(hits);
}

std::string evaluate(const std::string& pred_path, const std::string& gold_path) {
    const auto decisions = eval::load_decisions(pred_path);
    const auto records = kb::load_dataset(gold_path);
    return dump(eval::report_to_json(eval::evaluate_run(decisions, records), nlohmann::json::object()));
}

py::dict decision_dict(const rir::Decision& d) {
    py::dict out;
    out["label"] = std::string(kb::to_string(d.label));
    out["reason"] = d.reason;
    out["parse_status"] = std::string(rir::to_string(d.parse_status));
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Retrieval-augmented harmful meme attribution (native core)";

    py::register_exception<Error>(m, "Error", PyExc_RuntimeError);

    m.def("version", &cli::version_string);

    m.def(
        "run_cli",
        [](const std::vector<std::string>& args) {
            std::ostringstream out, err;
            int code = 0;
            {
                py::gil_scoped_release release;
                code = cli::run(args, out, err);
            }
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "Runs one command line; returns (exit_code, stdout, stderr).");

    m.def("tokenize", &text::token_surfaces, py::arg("text"));

    m.def(
        "bleu4", [](const std::string& c, const std::string& r) { return eval::bleu4(c, r); }, py::arg("candidate"),
        py::arg("reference"));
    m.def("rouge_l", &eval::rouge_l, py::arg("candidate"), py::arg("reference"));

    m.def(
        "prf1",
        [](std::size_t tp, std::size_t fp, std::size_t fn, std::size_t tn) {
            const auto r = eval::prf1({tp, fp, fn, tn});
            py::dict out;
            out["acc"] = r.accuracy;
            out["p"] = r.precision;
            out["r"] = r.recall;
            out["f1"] = r.f1;
            return out;
        },
        py::arg("tp"), py::arg("fp"), py::arg("fn"), py::arg("tn"));

    m.def("relevance_posterior", &ake::relevance_posterior, py::arg("l_yes"), py::arg("l_no"));

    m.def(
        "query_set",
        [](const std::string& text, const std::string& description, const std::vector<std::string>& expansion) {
            return ake::build_query_set(text, description, expansion).texts();
        },
        py::arg("text"), py::arg("description"), py::arg("expansion") = std::vector<std::string>{});

    m.def(
        "parse_decision", [](const std::string& response) { return decision_dict(rir::parse_decision(response)); },
        py::arg("response"));

    m.def(
        "build_index",
        [](const std::string& kb_path, const std::string& out_path, std::size_t dim) {
            model::MockBackend embedder;
            const auto index = text::build_knowledge_index(kb::load_kb(kb_path), embedder, dim);
            text::save_index(out_path, index);
            return index.kb.size();
        },
        py::arg("kb_path"), py::arg("out_path"), py::arg("dim") = text::kDefaultEmbeddingDim,
        "Indexes a knowledge base with the offline embedder; returns the entry count.");

    m.def("query_index_json", &query_index, py::arg("index_path"), py::arg("text"), py::arg("k") = 5,
          py::arg("w_bm25") = 0.5);
    m.def("evaluate_json", &evaluate, py::arg("pred_path"), py::arg("gold_path"));
}
