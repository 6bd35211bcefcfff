/* Marol: a compiler generator for qubit mapping and routing.
 *
 * C API of the shared library. All functions return marol_status; on
 * MAROL_ERROR the message is available via marol_last_error() (thread-local,
 * valid until the next failing call on the same thread). Strings returned
 * through char** outputs are heap-allocated; release them with
 * marol_string_free(). Handles are opaque and freed with their _free
 * function. Handles are immutable after creation and may be shared across
 * threads; a circuit or program handle must outlive results created from it.
 */
#ifndef MAROL_H
#define MAROL_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum marol_status {
    MAROL_OK = 0,
    MAROL_ERROR = 1,       /* parse/typecheck/load/internal failure */
    MAROL_NO_SOLUTION = 2, /* solve finished without a complete solution */
    MAROL_INVALID = 3      /* validation found violations */
} marol_status;

typedef struct marol_program marol_program;
typedef struct marol_arch marol_arch;
typedef struct marol_circuit marol_circuit;
typedef struct marol_result marol_result;

const char* marol_last_error(void);
void marol_string_free(char* s);

/* --- programs -------------------------------------------------------- */

/* Parses and typechecks Marol source. */
marol_status marol_program_parse(const char* source, marol_program** out);
/* Built-in bundles: "nisqmr", "nisq_ve", "scmr". */
marol_status marol_program_builtin(const char* name, marol_program** out);
void marol_program_free(marol_program* p);
/* Original source text. */
char* marol_program_source(const marol_program* p);
/* Canonical pretty-printed form (reparses to an equal program). */
char* marol_program_pretty(const marol_program* p);
/* 1 when the static analysis proves non-interference, else 0. */
int marol_program_noninterfering(const marol_program* p);

/* --- inputs ----------------------------------------------------------- */

/* Arch JSON {"n", "edges", "vertex_labels", "fields"}, validated against the
 * program's ArchInfo declaration. */
marol_status marol_arch_parse(const char* json, const marol_program* p, marol_arch** out);
void marol_arch_free(marol_arch* a);

/* Line-based circuit text: `<gate> <qubit> [<qubit> ...]`, `#` comments. */
marol_status marol_circuit_parse(const char* text, marol_circuit** out);
void marol_circuit_free(marol_circuit* c);
int marol_circuit_qubit_count(const marol_circuit* c);
int marol_circuit_instruction_count(const marol_circuit* c);

/* --- generators ------------------------------------------------------- */

/* kind: "line" (p1 = length), "grid" (p1 x p2), "compact" (p1 = qubit
 * capacity), "compact_magic_column" (p1 x p2 grid plus a magic column). */
marol_status marol_gen_arch(const char* kind, int p1, int p2, char** json_out);
/* Adds fields.edge_cost = -log(1-p) and fields.edge_error_rate = p with
 * p ~ U[1e-3, 1e-1] drawn per edge from the seed. */
marol_status marol_gen_ve_errors(const char* arch_json, uint64_t seed, char** json_out);

/* --- solving ---------------------------------------------------------- */

typedef struct marol_config {
    uint64_t seed;
    double timeout_seconds;
    int jobs;
    int warm_start;              /* 0/1 */
    int criticality_weighting;   /* 0/1 */
    int transition_full_search;  /* 0/1: full permutation search inside
                                    transition scoring */
    const int* fixed_map;        /* forced initial map: locations per
                                    ascending qubit id, or NULL */
    int fixed_map_len;
    int max_paths;               /* all_paths candidate cap */
    int path_length_slack;       /* extra edges over 2*shortest */
    int max_trees;               /* steiner_trees candidate cap */
} marol_config;

void marol_config_init(marol_config* cfg);

/* Runs the anytime search; every returned solution has already passed the
 * validator. MAROL_NO_SOLUTION when no worker completed a run in time. */
marol_status marol_solve(const marol_program* p, const marol_arch* a, const marol_circuit* c,
                         const marol_config* cfg, marol_result** out);
void marol_result_free(marol_result* r);
double marol_result_cost(const marol_result* r);
double marol_result_wall_to_best(const marol_result* r);
char* marol_result_solution_json(const marol_result* r);
/* CSV `wall_seconds,worker_id,best_cost`; rows are global-best improvements
 * so the cost column is non-increasing. */
char* marol_result_convergence_csv(const marol_result* r);
/* Run report: costs, timings, config echo, per-worker stats. */
char* marol_result_report_json(const marol_result* r);

/* --- validation and the exact oracle ---------------------------------- */

/* MAROL_OK when the solution satisfies the program on this instance;
 * MAROL_INVALID with one violation per line in *violations_out otherwise. */
marol_status marol_validate(const marol_program* p, const marol_arch* a, const marol_circuit* c,
                            const char* solution_json, char** violations_out);

typedef struct marol_oracle_bounds {
    int max_qubits;
    int max_locs;
    int max_instructions;
    int max_transitions;
} marol_oracle_bounds;

void marol_oracle_bounds_init(marol_oracle_bounds* b);

/* Exact minimum cost by uniform-cost search; MAROL_ERROR when the instance
 * exceeds the bounds or has no solution. */
marol_status marol_oracle(const marol_program* p, const marol_arch* a, const marol_circuit* c,
                          const marol_oracle_bounds* bounds, double* cost_out);

/* --- cooperative cancellation ----------------------------------------- */

/* Makes running and future solves return their best-so-far result. */
void marol_request_stop(void);
void marol_clear_stop(void);

#ifdef __cplusplus
}
#endif

#endif /* MAROL_H */
