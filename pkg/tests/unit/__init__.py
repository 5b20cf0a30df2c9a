# Unit tests