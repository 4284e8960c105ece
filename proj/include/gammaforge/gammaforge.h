#ifndef GAMMAFORGE_H
#define GAMMAFORGE_H

#ifdef __cplusplus
extern "C" {
#endif

#if defined(GF_BUILDING_LIBRARY)
#define GF_API __attribute__((visibility("default")))
#else
#define GF_API
#endif

typedef enum gf_status {
    GF_OK = 0,
    /* A definite mathematical "no": no immersion, a bag failed, ... */
    GF_NEGATIVE = 1,
    /* Search budget ran out before an answer. */
    GF_UNKNOWN = 2,
    GF_ERR_INVALID = 3,
    GF_ERR_PARSE = 4,
    GF_ERR_PRECONDITION = 5,
    GF_ERR_NOT_GENERATING = 6,
    GF_ERR_INTERNAL = 7
} gf_status;

typedef struct gf_group gf_group;
typedef struct gf_graph gf_graph;

typedef struct gf_decompose_options {
    int k;
    int n;
    /* 0 uses the theorem's t. */
    int override_t;
    /* 0 uses n|G|. */
    int outcome_bound;
    unsigned long long budget;
} gf_decompose_options;

GF_API const char* gf_version(void);

/* Message for the last failing call on this thread; never NULL. */
GF_API const char* gf_last_error(void);

/* Frees strings returned through char** out parameters. */
GF_API void gf_string_free(char* s);

/* "z3", "s3", "trivial" or a JSON group object. */
GF_API gf_status gf_group_parse(const char* text, gf_group** out);
GF_API void gf_group_free(gf_group* g);
GF_API int gf_group_order(const gf_group* g);
GF_API gf_status gf_group_to_json(const gf_group* g, char** out);

GF_API gf_status gf_graph_from_json(const char* json, gf_graph** out);
GF_API void gf_graph_free(gf_graph* g);
GF_API gf_status gf_graph_to_json(const gf_graph* g, char** out);
GF_API int gf_graph_vertex_count(const gf_graph* g);
GF_API int gf_graph_edge_count(const gf_graph* g);

/* kind: "plain", "rich" or "generating". generators may be NULL when
   count is 0. */
GF_API gf_status gf_make_flower(const char* kind, const gf_group* group, int k, int n, const int* generators,
                                int generator_count, gf_graph** out);

/* GF_OK with the immersion JSON, GF_NEGATIVE when none exists, GF_UNKNOWN
   when the budget ran out. budget 0 means the default. */
GF_API gf_status gf_find_immersion(const gf_graph* host, const gf_graph* pattern, unsigned long long budget,
                                   char** out);

/* subgroup: comma-separated generator indices ("" for the trivial
   subgroup). */
GF_API gf_status gf_pack_circuits(const gf_graph* g, const char* center, const char* subgroup, int r,
                                  unsigned long long budget, char** out);

GF_API gf_status gf_tcores(const gf_graph* g, int t, char** out);
GF_API gf_status gf_edge_blocks(const gf_graph* g, char** out);

/* bag: comma-separated vertex names. */
GF_API gf_status gf_value(const gf_graph* g, const char* bag, char** out);

/* GF_NEGATIVE when a core yields a rich flower (the JSON holds it). */
GF_API gf_status gf_decompose(const gf_graph* g, const gf_decompose_options* opts, char** out);

/* t and n of 0 are read from the decomposition JSON. GF_NEGATIVE when
   some bag satisfies neither outcome. */
GF_API gf_status gf_verify(const gf_graph* g, const char* decomposition, int t, int n, char** out);

/* GF_OK when the graph forbids the rich (G, t+1, n)-flower, GF_NEGATIVE
   when it admits it, GF_UNKNOWN on budget exhaustion. */
GF_API gf_status gf_check_converse(const gf_graph* g, const char* decomposition, int t, int n,
                                   unsigned long long budget, char** out);

GF_API gf_status gf_export_dot(const gf_graph* g, const char* decomposition, char** out);

/* GF_NEGATIVE if any check failed. */
GF_API gf_status gf_selftest(unsigned long long seed, char** out);

#ifdef __cplusplus
}
#endif

#endif
