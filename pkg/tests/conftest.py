from hypothesis import settings

# several properties call series summations whose cost varies with the draw
settings.register_profile("default", deadline=None, print_blob=True)
settings.load_profile("default")
