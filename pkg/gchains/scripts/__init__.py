# Command-line scripts package
