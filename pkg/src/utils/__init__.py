# Utils package: formula parsing, printing, corpora and output schemas
