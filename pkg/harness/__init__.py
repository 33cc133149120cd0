# Moment harness package
