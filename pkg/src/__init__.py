# Main package

