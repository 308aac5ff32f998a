/* C interface to the ffde library: signatures, Kripke models, evaluation,
 * proof checking, countermodel search, soundness fuzzing, and the
 * propositional four-valued oracle.
 *
 * Conventions:
 *   - All objects are opaque handles created by *_parse constructors and
 *     released by the matching *_free destructor.  Destructors accept NULL.
 *   - Every fallible function returns an ffde_status.  On failure the
 *     optional error_json out-parameter (when non-NULL) receives a
 *     heap-allocated JSON object {"error": {"kind": ..., "message": ...}};
 *     proof rejections add a "path" locating the offending node.
 *   - All returned strings are heap-allocated, NUL-terminated UTF-8 and must
 *     be released with ffde_string_free.  Out-parameters are written only on
 *     the status indicated in their documentation.
 */
#ifndef FFDE_H
#define FFDE_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ffde_status {
  FFDE_OK = 0,
  FFDE_ERROR_PARSE = 1,    /* malformed JSON, formula text, or proof shape */
  FFDE_ERROR_ARGUMENT = 2, /* well-formed input outside the supported range */
  FFDE_ERROR_PROOF = 3,    /* derivation rejected by the proof checker */
  FFDE_ERROR_INTERNAL = 4  /* unexpected failure; indicates a library bug */
} ffde_status;

typedef struct ffde_signature ffde_signature;
typedef struct ffde_model ffde_model;
typedef struct ffde_formula ffde_formula;
typedef struct ffde_proof ffde_proof;

/* Library semantic version, e.g. "1.0.0".  Static storage; do not free. */
const char* ffde_version(void);

/* Releases a string returned through any char** out-parameter. */
void ffde_string_free(char* s);

/* --------------------------------------------------------------------------
 * Signatures
 */

/* Parses {"logic": "ffde"|"fn4", "constants": [...], "predicates": {...}}. */
ffde_status ffde_signature_parse(const char* json_text, ffde_signature** out,
                                 char** error_json);

/* Overrides the signature's logic; accepts "ffde" or "fn4". */
ffde_status ffde_signature_set_logic(ffde_signature* sig, const char* logic,
                                     char** error_json);

void ffde_signature_free(ffde_signature* sig);

/* --------------------------------------------------------------------------
 * Formulas
 */

/* Parses a closed or open formula in the surface grammar. */
ffde_status ffde_formula_parse(const ffde_signature* sig, const char* text,
                               ffde_formula** out, char** error_json);

/* Renders back to the surface grammar; parse(render(f)) == f. */
ffde_status ffde_formula_render(const ffde_formula* f, char** out);

void ffde_formula_free(ffde_formula* f);

/* --------------------------------------------------------------------------
 * Kripke models
 */

ffde_status ffde_model_parse(const ffde_signature* sig, const char* json_text,
                             ffde_model** out, char** error_json);

/* Canonical JSON serialization (sorted keys, two-space indent, LF). */
ffde_status ffde_model_to_json(const ffde_model* m, char** out);

/* Runs all well-formedness checks.  *ok is 1 when no Error-severity
 * violation was found; report_json receives the full report either way.
 * persistence_safe selects whether late definedness of constants is an
 * error (1) or a warning (0). */
ffde_status ffde_model_validate(const ffde_signature* sig, const ffde_model* m,
                                int persistence_safe, int* ok, char** report_json);

/* Least monotone/congruent/diversity-closed extension of the model. */
ffde_status ffde_model_saturate(const ffde_signature* sig, const ffde_model* m,
                                ffde_model** out, char** error_json);

void ffde_model_free(ffde_model* m);

/* --------------------------------------------------------------------------
 * Evaluation
 */

/* Support (negated == 0) or anti-support (negated == 1) of f at a stage;
 * *value is 0 or 1.  The formula must be a sentence. */
ffde_status ffde_eval(const ffde_signature* sig, const ffde_model* m,
                      const ffde_formula* f, const char* stage, int negated,
                      int* value, char** error_json);

/* Combined verdict as one of "T", "F", "B", "N". */
ffde_status ffde_four_valued(const ffde_signature* sig, const ffde_model* m,
                             const ffde_formula* f, const char* stage,
                             char** value_name, char** error_json);

/* --------------------------------------------------------------------------
 * Proof checking
 */

ffde_status ffde_proof_parse(const ffde_signature* sig, const char* json_text,
                             ffde_proof** out, char** error_json);

ffde_status ffde_proof_to_json(const ffde_proof* p, char** out);

/* Checks the derivation.  On FFDE_OK, *sequent receives the proved sequent
 * rendered as "A1, A2 |- C" (with the turnstile in UTF-8).  On
 * FFDE_ERROR_PROOF, error_json locates and describes the defect. */
ffde_status ffde_proof_check(const ffde_signature* sig, const ffde_proof* p,
                             int permissive, char** sequent, char** error_json);

/* Like ffde_proof_check, but additionally requires every open assumption of
 * the checked sequent to be among the given premise formulas (strings in the
 * surface grammar).  A stray assumption is reported as FFDE_ERROR_PROOF. */
ffde_status ffde_proof_check_with_premises(const ffde_signature* sig,
                                           const ffde_proof* p, int permissive,
                                           const char* const* premises,
                                           size_t premise_count, char** sequent,
                                           char** error_json);

void ffde_proof_free(ffde_proof* p);

/* --------------------------------------------------------------------------
 * Countermodel search
 */

/* Decides gamma |= goal over all models within the bounds.  premises are
 * formula strings.  On FFDE_OK, *found is 1 when a countermodel exists
 * (verdict_json carries the model and refuting stage) and 0 when the bounds
 * were exhausted (verdict_json carries the bounds and model count). */
ffde_status ffde_decide(const ffde_signature* sig, const char* const* premises,
                        size_t premise_count, const char* goal, int max_stages,
                        int max_elements, int persistence_safe, int* found,
                        char** verdict_json, char** error_json);

/* --------------------------------------------------------------------------
 * Soundness fuzzing
 */

/* Generates `iterations` random derivations, checks them, and searches for
 * countermodels to every accepted sequent.  On FFDE_OK, *violation_count
 * receives the number of soundness violations and report_json the full
 * report (counts plus one replayable witness object per violation). */
ffde_status ffde_fuzz(const ffde_signature* sig, int iterations, uint64_t seed,
                      int max_stages, int max_elements, int persistence_safe,
                      int permissive, int max_depth, int* violation_count,
                      char** report_json, char** error_json);

/* --------------------------------------------------------------------------
 * Propositional four-valued oracle
 */

/* Truth-table consequence over the propositional fragment.  The premises and
 * goal are formula strings; every plain identifier is read as an atom.  On
 * FFDE_OK, *valid is 1 for consequence, 0 with a witness assignment in
 * verdict_json otherwise. */
ffde_status ffde_oracle(const char* const* premises, size_t premise_count,
                        const char* goal, int* valid, char** verdict_json,
                        char** error_json);

#ifdef __cplusplus
}
#endif

#endif /* FFDE_H */
