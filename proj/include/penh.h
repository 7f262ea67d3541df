/* Perceptual enhancement pipeline — C interface.
 *
 * All functions return penh_status; PENH_OK is 0. On failure the thread-local
 * message from penh_last_error() describes what went wrong. Strings returned
 * through char** out-parameters are heap-allocated and must be released with
 * penh_string_free().
 */
#ifndef PENH_H
#define PENH_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum penh_status {
  PENH_OK = 0,
  PENH_ERR_NOT_FOUND = 1,
  PENH_ERR_FORMAT = 2,
  PENH_ERR_IO = 3,
  PENH_ERR_SHAPE = 4,
  PENH_ERR_CONFIG = 5,
  PENH_ERR_EMPTY_CORPUS = 6,
  PENH_ERR_PAIRING = 7,
  PENH_ERR_DEPENDENCY = 8,
  PENH_ERR_DIVERGENCE = 9,
  PENH_ERR_CHECKPOINT_VERSION = 10,
  PENH_ERR_INVALID_ARGUMENT = 11,
  PENH_ERR_INTERNAL = 12
} penh_status;

/* Library version, static storage (do not free). */
const char* penh_version(void);

/* Message of the most recent failure on this thread; empty string if none. */
const char* penh_last_error(void);

void penh_string_free(char* s);

/* ---- corpus synthesis ---------------------------------------------------
 * Degrades every image under src_dir into out_dir (same relative paths,
 * luminance-gated), pairs the outputs with their sources, splits, and writes
 * <out_dir>/manifest.json. options_json may be NULL for defaults, or a JSON
 * object with any of: seed, brightness_threshold, r_max, sigma_max, mode
 * ("full" | "noise_only"), noise_only_sigma_max, train_frac, val_frac.
 */
penh_status penh_synth(const char* src_dir, const char* out_dir, const char* options_json,
                       int* accepted_out, int* skipped_out);

/* ---- training -----------------------------------------------------------
 * config_json: serialized train config; NULL for defaults. Unknown keys are
 * rejected. penh_default_train_config yields the full default document.
 * progress (nullable) is invoked after each step. Training artifacts
 * (train_log.csv, checkpoints) land in out_dir; on divergence the last good
 * state is <out_dir>/checkpoint_last_good.ckpt and the call returns
 * PENH_ERR_DIVERGENCE.
 */
typedef struct penh_loss_row {
  long long step;
  long long total_steps;
  double l_r, l_rfl, l_g, l_p, d_loss;
} penh_loss_row;

typedef void (*penh_train_progress_cb)(const penh_loss_row* row, void* user);

penh_status penh_default_train_config(char** json_out);
penh_status penh_train(const char* manifest_path, const char* out_dir, const char* config_json,
                       penh_train_progress_cb progress, void* user);

/* Resumes from a checkpoint; epochs_override > 0 replaces the configured
 * epoch count (a checkpoint_final.ckpt is already at its configured end). */
penh_status penh_train_resume(const char* checkpoint_path, const char* manifest_path,
                              const char* out_dir, int epochs_override,
                              penh_train_progress_cb progress, void* user);

/* ---- inference ---------------------------------------------------------- */
typedef struct penh_enhancer penh_enhancer;

penh_status penh_enhancer_open(const char* checkpoint_path, penh_enhancer** out);
void penh_enhancer_close(penh_enhancer* e);

/* input_path: image file or directory; outputs keep their filenames under
 * out_dir. n_written_out (nullable) receives the output count. */
penh_status penh_enhancer_run(penh_enhancer* e, const char* input_path, const char* out_dir,
                              int* n_written_out);

/* In-memory variant: rgb is row-major H×W×3 interleaved in [0,1]; out_rgb
 * must hold height*width*3 floats. Any size is accepted (padded internally).
 */
penh_status penh_enhancer_enhance(penh_enhancer* e, const float* rgb, int height, int width,
                                  float* out_rgb);

/* ---- evaluation & benchmarking ------------------------------------------
 * Scores the manifest's test split with the checkpoint's generator, writes
 * report.json + report.csv into out_dir, and (if table_out non-NULL) returns
 * the aligned text table. use_cie76 selects the simpler ΔE formula.
 */
penh_status penh_evaluate(const char* checkpoint_path, const char* manifest_path,
                          const char* out_dir, int use_cie76, char** table_out);

/* Times batch-1 inference at each square resolution (runs >= 3 plus one
 * untimed warm-up), writes bench.csv into out_dir, and optionally returns the
 * text table. device_label NULL defaults to "cpu". */
penh_status penh_bench(const char* checkpoint_path, const int* resolutions, int n_resolutions,
                       int runs, const char* device_label, const char* out_dir, char** table_out);

#ifdef __cplusplus
}
#endif

#endif /* PENH_H */
