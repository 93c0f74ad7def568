# Handlers package: one handle_* method per CLI subcommand
