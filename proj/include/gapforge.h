/* SPDX-License-Identifier: Apache-2.0 */
#ifndef GAPFORGE_H
#define GAPFORGE_H

#ifdef __cplusplus
extern "C" {
#endif

#if defined(GAPFORGE_BUILDING)
#define GF_API __attribute__((visibility("default")))
#else
#define GF_API
#endif

typedef enum gf_status {
  GF_OK = 0,
  GF_ERR_INVARIANT = 1, /* internal invariant breach */
  GF_ERR_INVALID = 2,   /* bad parameters or input files */
  GF_ERR_BUDGET = 3     /* a search or size budget ran out */
} gf_status;

typedef struct gf_session gf_session;

GF_API const char* gf_version(void);

GF_API gf_status gf_session_create(gf_session** out);
GF_API void gf_session_destroy(gf_session* s);

/* Message of the most recent failure on this session, "" after success. Owned by the session. */
GF_API const char* gf_session_last_error(const gf_session* s);

/* Runs a command ("tile.solve", "chain.spectrum", ...) with a JSON object of parameters.
   On GF_OK, and on GF_ERR_BUDGET when partial artifacts exist, *result_json receives a
   JSON document with keys status, text, result, artifacts and manifest; free it with
   gf_string_free. Otherwise *result_json is set to NULL. */
GF_API gf_status gf_run(gf_session* s, const char* command, const char* params_json, char** result_json);

/* JSON array of the accepted command names; free with gf_string_free. */
GF_API char* gf_command_list(void);

/* Byte-stable rendering of a JSON document (sorted keys, %.12e floats). */
GF_API gf_status gf_stable_dump(gf_session* s, const char* json_text, char** out);

GF_API void gf_string_free(char* p);

#ifdef __cplusplus
}
#endif

#endif
